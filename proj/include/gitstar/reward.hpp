#ifndef GITSTAR_REWARD_HPP
#define GITSTAR_REWARD_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gitstar/planner.hpp"

namespace gitstar
{
    /// The ten benchmark indicators of one planner on one problem. Failed
    /// runs contribute infinity to the time and cost samples.
    struct RunMetrics
    {
        double t_init_min = 0.0, t_init_med = 0.0, t_init_max = 0.0;
        double c_init_min = 0.0, c_init_med = 0.0, c_init_max = 0.0;
        double c_final_min = 0.0, c_final_med = 0.0, c_final_max = 0.0;
        double success = 0.0;
        std::size_t runs = 0u;

        /// Values in scoring order; success is the higher-is-better entry.
        std::array<double, 10> values() const
        {
            return {t_init_min, t_init_med, t_init_max, c_init_min, c_init_med,
                    c_init_max, c_final_min, c_final_med, c_final_max, success};
        }
        static constexpr std::size_t kSuccessIndex = 9u;
    };

    /// Aggregates per-run (t_init, c_init, c_final, success) samples.
    RunMetrics aggregateMetrics(const std::vector<PlanResult> &results);

    struct RewardConfig
    {
        double initial_score = 800.0;
        double delta = 10.0;
        std::array<double, 10> weights = {1.0, 3.5, 0.5, 1.0, 2.5,
                                          1.0, 1.0, 2.5, 1.0, 3.0};
        double bonus_low = 0.05;
        double bonus_high = 0.15;
        double c1 = 0.1;
        double c2 = 1.0;
        /// Partial-score multiple of the baseline tie score that triggers the
        /// segmented early abort.
        double abort_margin = 1.5;
        /// Sum the raw base score of rule 3 without the superiority sign.
        bool literal_base_score = false;
        double total_clamp = -790.0;
    };

    /// Per-metric base score with the infinity rules applied.
    double baseScore(double v_git, double v_eit, bool lower_is_better, double delta,
                     bool literal_base_score = false);

    /// Success-rate bonus; improvements lower the fitness.
    double successBonus(double succ_git, double succ_eit, double delta,
                        double bonus_low = 0.05, double bonus_high = 0.15);

    /// Weighted sum of base scores and bonuses over the ten metrics.
    double totalScore(const RunMetrics &metrics_git, const RunMetrics &metrics_eit,
                      const RewardConfig &cfg);

    /// Tie score: what a baseline-identical planner would earn against the
    /// cached baseline record (delta per finite metric, zero where both
    /// records are infinite).
    double baselineTieScore(const RunMetrics &metrics_eit, const RewardConfig &cfg);

    /// initial + mean + c1 * population variance + c2 * |psi|; totals are
    /// clamped from below to keep the fitness positive.
    double fitness(std::vector<double> totals, std::size_t psi_size, const RewardConfig &cfg,
                   std::size_t *clamped = nullptr);

    struct BenchmarkProblem
    {
        ProblemInstance problem;
        double time_limit_s = 1.0;
        std::optional<std::uint64_t> batch_budget;
        std::size_t runs = 10u;
        std::uint64_t seed_base = 0u;
        std::string name;
    };

    struct BenchmarkSet
    {
        std::vector<BenchmarkProblem> problems;
        /// Indices into problems, ordered by increasing difficulty; must
        /// cover every problem exactly once.
        std::vector<std::vector<std::size_t>> segments;

        void validate() const;
        /// Single segment holding every problem in order.
        static std::vector<std::vector<std::size_t>> trivialSegments(std::size_t n);
    };

    struct PlannerSetup
    {
        KeyMode mode = KeyMode::Baseline;
        std::optional<ExprIndividual> evolved;
    };

    /// Paired-seed evaluation: runs seeds seed_base .. seed_base+runs-1 and
    /// aggregates. Deterministic in batch-budget mode.
    RunMetrics evaluatePlanner(const PlannerSetup &setup, const BenchmarkProblem &bench,
                               const PlannerConfig &base_config, std::size_t jobs = 1u,
                               std::vector<PlanResult> *raw_results = nullptr);

    /// Baseline metrics for every benchmark problem (the control group),
    /// computed once and reused across the population.
    std::vector<RunMetrics> baselineMetrics(const BenchmarkSet &benchmark,
                                            const PlannerConfig &base_config,
                                            std::size_t jobs = 1u);

    /// Difficulty-ordered evaluation with early abort; returns the fitness
    /// (the penalty fitness L when aborted).
    double segmentedEvaluate(const ExprIndividual &individual, const BenchmarkSet &benchmark,
                             const std::vector<RunMetrics> &baseline_cache,
                             const RewardConfig &cfg, const PlannerConfig &base_config,
                             std::size_t *clamped = nullptr);

    struct GenerationStats
    {
        std::size_t generation = 0u;
        double min_rho = 0.0;
        double mean_rho = 0.0;
        double max_rho = 0.0;
        double best_rho_so_far = 0.0;
    };

    struct TrainResult
    {
        ExprIndividual best;
        std::vector<GenerationStats> generations;
        std::size_t clamped_totals = 0u;
    };

    using GenerationSink = std::function<void(const GenerationStats &)>;

    /// The full training loop: tournament selection, subtree crossover,
    /// point mutation, elitism of one, argmin over all generations.
    /// Seeded individuals replace the head of the initial population.
    TrainResult trainRGP(const BenchmarkSet &benchmark, const GpParams &gp_params,
                         const RewardConfig &reward_cfg, const PlannerConfig &base_config,
                         std::uint64_t seed, std::size_t jobs = 1u,
                         const GenerationSink &sink = nullptr,
                         const std::vector<ExprIndividual> &seeded = {});
}  // namespace gitstar

#endif
