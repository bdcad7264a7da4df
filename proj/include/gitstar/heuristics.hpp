#ifndef GITSTAR_HEURISTICS_HPP
#define GITSTAR_HEURISTICS_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "gitstar/world.hpp"

namespace gitstar
{
    /// Potential field gains. Charges are fixed to 1 and absorbed into the
    /// gains; energies are returned as positive magnitudes.
    struct ApfConfig
    {
        double k_r = 1e-3;
        double k_a = 1e-2;
        double rho0 = 0.1;
        double r_min = 1e-6;
        // The attractive term anchors at the start by default; the goal
        // center is selectable instead.
        bool attract_to_goal = false;
    };

    struct CostEstimates
    {
        double g_hat;  // Euclidean lower bound start -> x_t
        double h_hat;  // Euclidean lower bound x_t -> goal region
        double c_hat;  // Euclidean lower bound x_s -> x_t
    };

    /// Admissible Euclidean estimates for an edge (x_s, x_t).
    CostEstimates costHeuristics(const ProblemInstance &problem, const StateVec &x_s,
                                 const StateVec &x_t);

    double gHat(const ProblemInstance &problem, const StateVec &x);
    double hHat(const ProblemInstance &problem, const StateVec &x);

    /// Collision checks needed to validate the segment at the given
    /// resolution (the interior+far samples; 0 for coincident states).
    std::uint64_t edgeEffort(const StateVec &a, const StateVec &b, double resolution);

    /// Admissible bound on the checks remaining from x back to the start.
    std::uint64_t remainingEffort(const ProblemInstance &problem, const StateVec &x,
                                  double resolution);

    double attractiveForce(double r, const ApfConfig &cfg);
    double repulsiveForce(double r, const ApfConfig &cfg);
    double attractiveEnergy(double r, const ApfConfig &cfg);
    double repulsiveEnergy(double r, const ApfConfig &cfg);

    /// Total potential at x: attraction toward the anchor plus the repulsive
    /// sum over the invalid samples. Always finite (r_min clamp).
    double potentialEnergy(const StateVec &x, const std::vector<StateVec> &invalid_samples,
                           const StateVec &anchor, const ApfConfig &cfg);

    /// Number of neighbors that are currently reverse-tree vertices.
    std::size_t dynamicImportance(const std::vector<std::size_t> &neighbor_ids,
                                  const std::function<bool(std::size_t)> &in_reverse_tree);
}  // namespace gitstar

#endif
