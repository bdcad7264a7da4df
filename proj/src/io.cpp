#include "gitstar/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gitstar
{
    namespace
    {
        nlohmann::json boxToJson(const AxisBox &box)
        {
            return {{"lo", box.lo}, {"hi", box.hi}};
        }

        AxisBox boxFromJson(const nlohmann::json &j)
        {
            AxisBox box;
            box.lo = j.at("lo").get<StateVec>();
            box.hi = j.at("hi").get<StateVec>();
            if (box.lo.size() != box.hi.size())
            {
                throw std::invalid_argument("box lo/hi length mismatch");
            }
            for (std::size_t i = 0u; i < box.lo.size(); ++i)
            {
                if (box.lo[i] > box.hi[i])
                {
                    throw std::invalid_argument("box lo exceeds hi");
                }
            }
            return box;
        }

        nlohmann::json finiteOrNull(double v)
        {
            if (std::isfinite(v))
            {
                return v;
            }
            return nullptr;
        }

        std::string csvNumber(double v)
        {
            if (std::isinf(v))
            {
                return "inf";
            }
            char buffer[64];
            std::snprintf(buffer, sizeof(buffer), "%.17g", v);
            return buffer;
        }
    }  // namespace

    nlohmann::json problemToJson(const ProblemInstance &problem)
    {
        nlohmann::json obstacles = nlohmann::json::array();
        for (const auto &box : problem.obstacles)
        {
            obstacles.push_back(boxToJson(box));
        }
        return {{"dimension", problem.dimension},
                {"start", problem.start},
                {"goal_box", boxToJson(problem.goal_box)},
                {"obstacles", obstacles},
                {"scenario_id", scenarioName(problem.scenario_id)},
                {"seed", problem.seed}};
    }

    ProblemInstance problemFromJson(const nlohmann::json &j)
    {
        ProblemInstance problem;
        problem.dimension = j.at("dimension").get<int>();
        problem.start = j.at("start").get<StateVec>();
        problem.goal_box = boxFromJson(j.at("goal_box"));
        for (const auto &box : j.at("obstacles"))
        {
            problem.obstacles.push_back(boxFromJson(box));
        }
        const auto kind = scenarioFromName(j.at("scenario_id").get<std::string>());
        if (!kind.has_value())
        {
            throw std::invalid_argument("unknown scenario_id");
        }
        problem.scenario_id = *kind;
        problem.seed = j.at("seed").get<std::uint64_t>();

        if (static_cast<int>(problem.start.size()) != problem.dimension)
        {
            throw std::invalid_argument("start dimension mismatch");
        }
        return problem;
    }

    void saveProblem(const std::string &path, const ProblemInstance &problem)
    {
        std::ofstream out(path);
        if (!out)
        {
            throw std::runtime_error("cannot open for writing: " + path);
        }
        out << problemToJson(problem).dump(2) << "\n";
    }

    ProblemInstance loadProblem(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
        {
            throw std::runtime_error("cannot open problem file: " + path);
        }
        nlohmann::json j;
        in >> j;
        return problemFromJson(j);
    }

    nlohmann::json runRecordToJson(const std::string &planner_id,
                                   const std::string &problem_id, std::uint64_t seed,
                                   const PlanResult &result)
    {
        nlohmann::json improvements = nlohmann::json::array();
        for (const auto &imp : result.improvements)
        {
            improvements.push_back({imp.t, imp.cost});
        }
        return {{"planner", planner_id},
                {"problem", problem_id},
                {"seed", seed},
                {"success", result.success},
                {"t_init", finiteOrNull(result.t_init)},
                {"c_init", finiteOrNull(result.c_init)},
                {"c_final", finiteOrNull(result.c_final)},
                {"improvements", improvements},
                {"state_checks", result.state_checks},
                {"checks_to_first", result.success ? nlohmann::json(result.checks_to_first)
                                                   : nlohmann::json(nullptr)},
                {"batches", result.batches},
                {"samples_drawn", result.samples_drawn}};
    }

    BenchmarkSet benchmarkFromJson(const nlohmann::json &j)
    {
        BenchmarkSet set;
        for (const auto &p : j.at("problems"))
        {
            BenchmarkProblem bench;
            const auto dimension = p.at("dimension").get<int>();
            const auto seed = p.at("seed").get<std::uint64_t>();
            const auto kind_name = p.at("scenario").get<std::string>();
            const auto kind = scenarioFromName(kind_name);
            if (!kind.has_value())
            {
                throw std::invalid_argument("unknown scenario: " + kind_name);
            }
            ScenarioParams params;
            if (p.contains("sealed"))
            {
                params.sealed = p.at("sealed").get<bool>();
            }
            if (p.contains("rect_count"))
            {
                params.rect_count = p.at("rect_count").get<std::size_t>();
            }
            bench.problem = generateScenario(*kind, dimension, seed, params);
            if (p.contains("batch_budget"))
            {
                bench.batch_budget = p.at("batch_budget").get<std::uint64_t>();
            }
            else
            {
                bench.time_limit_s = p.at("time_limit_s").get<double>();
            }
            bench.runs = p.at("runs").get<std::size_t>();
            bench.seed_base = p.contains("run_seed_base")
                                  ? p.at("run_seed_base").get<std::uint64_t>()
                                  : seed;
            bench.name = p.contains("name")
                             ? p.at("name").get<std::string>()
                             : kind_name + std::to_string(dimension) + "-s" +
                                   std::to_string(seed);
            set.problems.push_back(std::move(bench));
        }
        if (j.contains("segments"))
        {
            for (const auto &segment : j.at("segments"))
            {
                set.segments.push_back(segment.get<std::vector<std::size_t>>());
            }
        }
        else
        {
            set.segments = BenchmarkSet::trivialSegments(set.problems.size());
        }
        set.validate();
        return set;
    }

    BenchmarkSet loadBenchmark(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
        {
            throw std::runtime_error("cannot open benchmark file: " + path);
        }
        nlohmann::json j;
        in >> j;
        return benchmarkFromJson(j);
    }

    std::string metricsCsvHeader()
    {
        return "planner,problem,t_init_min,t_init_med,t_init_max,c_init_min,c_init_med,"
               "c_init_max,c_final_min,c_final_med,c_final_max,success";
    }

    std::string metricsCsvRow(const std::string &planner_id, const std::string &problem_id,
                              const RunMetrics &metrics)
    {
        std::ostringstream row;
        row << planner_id << ',' << problem_id;
        for (const double v : metrics.values())
        {
            row << ',' << csvNumber(v);
        }
        return row.str();
    }

    void saveHeuristic(const std::string &path, const ExprIndividual &individual)
    {
        std::ofstream out(path);
        if (!out)
        {
            throw std::runtime_error("cannot open for writing: " + path);
        }
        out << individualToText(individual);
    }

    ExprIndividual loadHeuristic(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
        {
            throw std::runtime_error("cannot open heuristic file: " + path);
        }
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return individualFromText(buffer.str());
    }
}  // namespace gitstar
