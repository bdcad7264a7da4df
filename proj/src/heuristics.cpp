#include "gitstar/heuristics.hpp"

#include <algorithm>
#include <cmath>

namespace gitstar
{
    CostEstimates costHeuristics(const ProblemInstance &problem, const StateVec &x_s,
                                 const StateVec &x_t)
    {
        return CostEstimates{gHat(problem, x_t), hHat(problem, x_t), distance(x_s, x_t)};
    }

    double gHat(const ProblemInstance &problem, const StateVec &x)
    {
        return distance(problem.start, x);
    }

    double hHat(const ProblemInstance &problem, const StateVec &x)
    {
        return problem.goal_box.distanceTo(x);
    }

    std::uint64_t edgeEffort(const StateVec &a, const StateVec &b, double resolution)
    {
        return static_cast<std::uint64_t>(std::ceil(distance(a, b) / resolution));
    }

    std::uint64_t remainingEffort(const ProblemInstance &problem, const StateVec &x,
                                  double resolution)
    {
        return static_cast<std::uint64_t>(
            std::ceil(distance(x, problem.start) / resolution));
    }

    double attractiveForce(double r, const ApfConfig &cfg)
    {
        const double rc = std::max(r, cfg.r_min);
        return cfg.k_a / (rc * rc);
    }

    double repulsiveForce(double r, const ApfConfig &cfg)
    {
        if (r > cfg.rho0)
        {
            return 0.0;
        }
        const double rc = std::max(r, cfg.r_min);
        return cfg.k_r / (rc * rc);
    }

    double attractiveEnergy(double r, const ApfConfig &cfg)
    {
        return cfg.k_a / std::max(r, cfg.r_min);
    }

    double repulsiveEnergy(double r, const ApfConfig &cfg)
    {
        if (r > cfg.rho0)
        {
            return 0.0;
        }
        return cfg.k_r / std::max(r, cfg.r_min);
    }

    double potentialEnergy(const StateVec &x, const std::vector<StateVec> &invalid_samples,
                           const StateVec &anchor, const ApfConfig &cfg)
    {
        const double rho0_sq = cfg.rho0 * cfg.rho0;
        double repulsive = 0.0;
        for (const auto &sample : invalid_samples)
        {
            const double r_sq = squaredDistance(x, sample);
            if (r_sq > rho0_sq)
            {
                continue;
            }
            repulsive += cfg.k_r / std::max(std::sqrt(r_sq), cfg.r_min);
        }
        return repulsive + attractiveEnergy(distance(x, anchor), cfg);
    }

    std::size_t dynamicImportance(const std::vector<std::size_t> &neighbor_ids,
                                  const std::function<bool(std::size_t)> &in_reverse_tree)
    {
        std::size_t count = 0u;
        for (const auto id : neighbor_ids)
        {
            if (in_reverse_tree(id))
            {
                ++count;
            }
        }
        return count;
    }
}  // namespace gitstar
