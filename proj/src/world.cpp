#include "gitstar/world.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace gitstar
{
    namespace
    {
        void requireSameDimension(const StateVec &a, const StateVec &b)
        {
            if (a.size() != b.size())
            {
                throw std::invalid_argument("state dimension mismatch");
            }
        }
    }  // namespace

    double squaredDistance(const StateVec &a, const StateVec &b)
    {
        requireSameDimension(a, b);
        double sum = 0.0;
        for (std::size_t i = 0u; i < a.size(); ++i)
        {
            const double d = a[i] - b[i];
            sum += d * d;
        }
        return sum;
    }

    double distance(const StateVec &a, const StateVec &b)
    {
        return std::sqrt(squaredDistance(a, b));
    }

    bool AxisBox::contains(const StateVec &x) const
    {
        requireSameDimension(lo, x);
        for (std::size_t i = 0u; i < x.size(); ++i)
        {
            if (x[i] < lo[i] || x[i] > hi[i])
            {
                return false;
            }
        }
        return true;
    }

    bool AxisBox::intersects(const AxisBox &other) const
    {
        requireSameDimension(lo, other.lo);
        for (std::size_t i = 0u; i < lo.size(); ++i)
        {
            if (hi[i] < other.lo[i] || other.hi[i] < lo[i])
            {
                return false;
            }
        }
        return true;
    }

    StateVec AxisBox::center() const
    {
        StateVec c(lo.size());
        for (std::size_t i = 0u; i < lo.size(); ++i)
        {
            c[i] = 0.5 * (lo[i] + hi[i]);
        }
        return c;
    }

    double AxisBox::distanceTo(const StateVec &x) const
    {
        requireSameDimension(lo, x);
        double sum = 0.0;
        for (std::size_t i = 0u; i < x.size(); ++i)
        {
            double d = 0.0;
            if (x[i] < lo[i])
            {
                d = lo[i] - x[i];
            }
            else if (x[i] > hi[i])
            {
                d = x[i] - hi[i];
            }
            sum += d * d;
        }
        return std::sqrt(sum);
    }

    double PathResult::recomputeCost() const
    {
        double sum = 0.0;
        for (std::size_t i = 1u; i < states.size(); ++i)
        {
            sum += distance(states[i - 1u], states[i]);
        }
        return sum;
    }

    bool isStateValid(const ProblemInstance &problem, const StateVec &x)
    {
        if (static_cast<int>(x.size()) != problem.dimension)
        {
            throw std::invalid_argument("state dimension mismatch");
        }
        for (const auto &box : problem.obstacles)
        {
            if (box.contains(x))
            {
                return false;
            }
        }
        return true;
    }

    bool isEdgeValid(const ProblemInstance &problem, const StateVec &a, const StateVec &b,
                     double resolution)
    {
        requireSameDimension(a, b);
        if (resolution <= 0.0)
        {
            throw std::invalid_argument("resolution must be positive");
        }
        const double dist = distance(a, b);
        const auto segments = static_cast<std::size_t>(std::ceil(dist / resolution));
        if (segments == 0u)
        {
            return isStateValid(problem, a);
        }
        StateVec point(a.size());
        for (std::size_t k = 0u; k <= segments; ++k)
        {
            const double t = static_cast<double>(k) / static_cast<double>(segments);
            for (std::size_t i = 0u; i < a.size(); ++i)
            {
                point[i] = a[i] + t * (b[i] - a[i]);
            }
            if (!isStateValid(problem, point))
            {
                return false;
            }
        }
        return true;
    }

    double defaultEdgeResolution(int dimension)
    {
        return 0.002 * std::sqrt(static_cast<double>(dimension));
    }

    std::string scenarioName(ScenarioKind kind)
    {
        switch (kind)
        {
            case ScenarioKind::DividingWalls:
                return "dw";
            case ScenarioKind::RandomRectangles:
                return "rr";
            case ScenarioKind::GoalEnclosure:
                return "ge";
            case ScenarioKind::Custom:
                return "custom";
        }
        return "custom";
    }

    std::optional<ScenarioKind> scenarioFromName(const std::string &name)
    {
        if (name == "dw" || name == "dividing_walls")
        {
            return ScenarioKind::DividingWalls;
        }
        if (name == "rr" || name == "random_rectangles")
        {
            return ScenarioKind::RandomRectangles;
        }
        if (name == "ge" || name == "goal_enclosure")
        {
            return ScenarioKind::GoalEnclosure;
        }
        if (name == "custom")
        {
            return ScenarioKind::Custom;
        }
        return std::nullopt;
    }

    namespace
    {
        StateVec makeState(int dimension, double first, double rest)
        {
            StateVec x(static_cast<std::size_t>(dimension), rest);
            x[0] = first;
            return x;
        }

        AxisBox goalBoxAround(const StateVec &center, double width)
        {
            AxisBox box;
            box.lo.resize(center.size());
            box.hi.resize(center.size());
            for (std::size_t i = 0u; i < center.size(); ++i)
            {
                box.lo[i] = std::max(0.0, center[i] - 0.5 * width);
                box.hi[i] = std::min(1.0, center[i] + 0.5 * width);
            }
            return box;
        }

        // A wall perpendicular to axis 0 with one gap opening along axis 1.
        // The wall extends over the full range of every remaining axis.
        void addWallWithGap(std::vector<AxisBox> &obstacles, int dimension, double x_lo,
                            double x_hi, double gap_lo, double gap_hi)
        {
            const auto n = static_cast<std::size_t>(dimension);
            AxisBox below;
            below.lo = StateVec(n, 0.0);
            below.hi = StateVec(n, 1.0);
            below.lo[0] = x_lo;
            below.hi[0] = x_hi;
            below.hi[1] = gap_lo;
            obstacles.push_back(below);

            AxisBox above = below;
            above.lo[1] = gap_hi;
            above.hi[1] = 1.0;
            obstacles.push_back(above);
        }

        ProblemInstance makeDividingWalls(int dimension, std::uint64_t seed,
                                          const ScenarioParams &params)
        {
            ProblemInstance problem;
            problem.dimension = dimension;
            problem.scenario_id = ScenarioKind::DividingWalls;
            problem.seed = seed;
            problem.start = makeState(dimension, 0.05, 0.5);
            problem.goal_box = goalBoxAround(makeState(dimension, 0.95, 0.5), params.goal_width);

            // Three walls with gaps at staggered heights; thicknesses and gap
            // widths follow the 2-D layout, extruded along extra axes.
            addWallWithGap(problem.obstacles, dimension, 0.30, 0.33, 0.70, 0.82);
            addWallWithGap(problem.obstacles, dimension, 0.55, 0.56, 0.125, 0.25);
            addWallWithGap(problem.obstacles, dimension, 0.75, 0.80, 0.45, 0.55);
            return problem;
        }

        ProblemInstance makeRandomRectangles(int dimension, std::uint64_t seed,
                                             const ScenarioParams &params)
        {
            ProblemInstance problem;
            problem.dimension = dimension;
            problem.scenario_id = ScenarioKind::RandomRectangles;
            problem.seed = seed;
            problem.start = StateVec(static_cast<std::size_t>(dimension), 0.4);
            problem.goal_box =
                goalBoxAround(StateVec(static_cast<std::size_t>(dimension), 0.85),
                              params.goal_width);

            const std::size_t count =
                params.rect_count.value_or(10u * static_cast<std::size_t>(dimension));
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> center_dist(0.0, 1.0);
            std::uniform_real_distribution<double> width_dist(params.rect_min_width,
                                                              params.rect_max_width);

            for (std::size_t k = 0u; k < count; ++k)
            {
                bool placed = false;
                for (std::size_t attempt = 0u; attempt < params.redraw_cap; ++attempt)
                {
                    AxisBox box;
                    box.lo.resize(static_cast<std::size_t>(dimension));
                    box.hi.resize(static_cast<std::size_t>(dimension));
                    for (int i = 0; i < dimension; ++i)
                    {
                        const double c = center_dist(rng);
                        const double w = width_dist(rng);
                        box.lo[static_cast<std::size_t>(i)] = std::max(0.0, c - 0.5 * w);
                        box.hi[static_cast<std::size_t>(i)] = std::min(1.0, c + 0.5 * w);
                    }
                    if (box.contains(problem.start) || box.intersects(problem.goal_box))
                    {
                        continue;
                    }
                    problem.obstacles.push_back(box);
                    placed = true;
                    break;
                }
                if (!placed)
                {
                    throw ScenarioGenerationError(
                        "random rectangles: redraw cap exhausted while placing obstacle " +
                        std::to_string(k));
                }
            }
            return problem;
        }

        ProblemInstance makeGoalEnclosure(int dimension, std::uint64_t seed,
                                          const ScenarioParams &params)
        {
            ProblemInstance problem;
            problem.dimension = dimension;
            problem.scenario_id = ScenarioKind::GoalEnclosure;
            problem.seed = seed;
            problem.start = makeState(dimension, 0.1, 0.5);
            const StateVec goal_center = makeState(dimension, 0.6, 0.5);
            problem.goal_box = goalBoxAround(goal_center, params.goal_width);

            const double h = params.enclosure_half_extent;
            const double t = params.enclosure_wall;
            const auto n = static_cast<std::size_t>(dimension);

            // One slab per face of the hyperrectangle shell around the goal.
            // The face farthest from the start (+axis 0) stays open unless
            // sealed.
            for (std::size_t axis = 0u; axis < n; ++axis)
            {
                for (int side = -1; side <= 1; side += 2)
                {
                    if (axis == 0u && side == 1 && !params.sealed)
                    {
                        continue;
                    }
                    AxisBox slab;
                    slab.lo.resize(n);
                    slab.hi.resize(n);
                    for (std::size_t i = 0u; i < n; ++i)
                    {
                        slab.lo[i] = goal_center[i] - h;
                        slab.hi[i] = goal_center[i] + h;
                    }
                    if (side < 0)
                    {
                        slab.hi[axis] = goal_center[axis] - h + t;
                    }
                    else
                    {
                        slab.lo[axis] = goal_center[axis] + h - t;
                    }
                    problem.obstacles.push_back(slab);
                }
            }
            return problem;
        }
    }  // namespace

    ProblemInstance generateScenario(ScenarioKind kind, int dimension, std::uint64_t seed,
                                     const ScenarioParams &params)
    {
        if (dimension < 2)
        {
            throw std::invalid_argument("dimension must be at least 2");
        }
        ProblemInstance problem;
        switch (kind)
        {
            case ScenarioKind::DividingWalls:
                problem = makeDividingWalls(dimension, seed, params);
                break;
            case ScenarioKind::RandomRectangles:
                problem = makeRandomRectangles(dimension, seed, params);
                break;
            case ScenarioKind::GoalEnclosure:
                problem = makeGoalEnclosure(dimension, seed, params);
                break;
            case ScenarioKind::Custom:
                throw std::invalid_argument("custom scenarios are loaded, not generated");
        }

        if (!isStateValid(problem, problem.start))
        {
            throw ScenarioGenerationError("generated start state is invalid");
        }
        if (!isStateValid(problem, problem.goalCenter()))
        {
            throw ScenarioGenerationError("generated goal center is invalid");
        }
        if (problem.goal_box.contains(problem.start))
        {
            throw ScenarioGenerationError("start lies inside the goal region");
        }
        return problem;
    }
}  // namespace gitstar
