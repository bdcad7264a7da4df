#ifndef GITSTAR_IO_HPP
#define GITSTAR_IO_HPP

#include <string>

#include <json.hpp>

#include "gitstar/gp.hpp"
#include "gitstar/reward.hpp"
#include "gitstar/world.hpp"

namespace gitstar
{
    nlohmann::json problemToJson(const ProblemInstance &problem);
    ProblemInstance problemFromJson(const nlohmann::json &j);

    void saveProblem(const std::string &path, const ProblemInstance &problem);
    ProblemInstance loadProblem(const std::string &path);

    /// One JSONL record per run; infinities are serialized as null alongside
    /// the success flag.
    nlohmann::json runRecordToJson(const std::string &planner_id,
                                   const std::string &problem_id, std::uint64_t seed,
                                   const PlanResult &result);

    BenchmarkSet benchmarkFromJson(const nlohmann::json &j);
    BenchmarkSet loadBenchmark(const std::string &path);

    std::string metricsCsvHeader();
    std::string metricsCsvRow(const std::string &planner_id, const std::string &problem_id,
                              const RunMetrics &metrics);

    void saveHeuristic(const std::string &path, const ExprIndividual &individual);
    ExprIndividual loadHeuristic(const std::string &path);
}  // namespace gitstar

#endif
