#ifndef GITSTAR_WORLD_HPP
#define GITSTAR_WORLD_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gitstar
{
    /// A configuration in the unit hypercube [0,1]^n.
    using StateVec = std::vector<double>;

    double distance(const StateVec &a, const StateVec &b);
    double squaredDistance(const StateVec &a, const StateVec &b);

    /// Axis-aligned box, closed on all faces.
    struct AxisBox
    {
        StateVec lo;
        StateVec hi;

        /// Closed containment: boundary points count as inside.
        bool contains(const StateVec &x) const;
        bool intersects(const AxisBox &other) const;
        StateVec center() const;

        /// Euclidean distance from x to the box (0 if inside).
        double distanceTo(const StateVec &x) const;
    };

    enum class ScenarioKind
    {
        DividingWalls,
        RandomRectangles,
        GoalEnclosure,
        Custom
    };

    std::string scenarioName(ScenarioKind kind);
    std::optional<ScenarioKind> scenarioFromName(const std::string &name);

    struct ScenarioParams
    {
        // Goal region edge length (clipped to the unit cube).
        double goal_width = 0.1;

        // Random rectangles: obstacle count defaults to 10 * dimension.
        std::optional<std::size_t> rect_count;
        double rect_min_width = 0.05;
        double rect_max_width = 0.15;
        std::size_t redraw_cap = 1000;

        // Goal enclosure geometry.
        double enclosure_half_extent = 0.2;
        double enclosure_wall = 0.05;
        // Closes the far face as well; the goal becomes unreachable.
        bool sealed = false;
    };

    struct ProblemInstance
    {
        int dimension = 0;
        std::vector<AxisBox> obstacles;
        StateVec start;
        AxisBox goal_box;
        ScenarioKind scenario_id = ScenarioKind::Custom;
        std::uint64_t seed = 0;

        StateVec goalCenter() const { return goal_box.center(); }
    };

    struct PathResult
    {
        std::vector<StateVec> states;
        double cost = 0.0;

        /// Recomputes the segment-length sum from the states.
        double recomputeCost() const;
    };

    class ScenarioGenerationError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// False iff x lies inside or on the boundary of any obstacle box.
    bool isStateValid(const ProblemInstance &problem, const StateVec &x);

    /// Checks ceil(dist/resolution) + 1 evenly spaced states, endpoints included.
    bool isEdgeValid(const ProblemInstance &problem, const StateVec &a, const StateVec &b,
                     double resolution);

    /// 0.002 * sqrt(n): fine enough that a 0.01-thick wall cannot be tunneled
    /// for n <= 8.
    double defaultEdgeResolution(int dimension);

    /// Deterministic in (kind, dimension, seed, params).
    ProblemInstance generateScenario(ScenarioKind kind, int dimension, std::uint64_t seed,
                                     const ScenarioParams &params = {});
}  // namespace gitstar

#endif
