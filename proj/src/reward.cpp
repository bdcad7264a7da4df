#include "gitstar/reward.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gitstar/parallel.hpp"

namespace gitstar
{
    namespace
    {
        constexpr double kInf = std::numeric_limits<double>::infinity();

        double medianOf(std::vector<double> values)
        {
            std::sort(values.begin(), values.end());
            const std::size_t n = values.size();
            if (n % 2u == 1u)
            {
                return values[n / 2u];
            }
            const double a = values[n / 2u - 1u];
            const double b = values[n / 2u];
            if (std::isinf(a) || std::isinf(b))
            {
                return kInf;
            }
            return 0.5 * (a + b);
        }
    }  // namespace

    RunMetrics aggregateMetrics(const std::vector<PlanResult> &results)
    {
        if (results.empty())
        {
            throw std::invalid_argument("aggregateMetrics needs at least one run");
        }
        std::vector<double> t_init, c_init, c_final;
        std::size_t successes = 0u;
        for (const auto &r : results)
        {
            t_init.push_back(r.t_init);
            c_init.push_back(r.c_init);
            c_final.push_back(r.c_final);
            if (r.success)
            {
                ++successes;
            }
        }
        RunMetrics m;
        m.t_init_min = *std::min_element(t_init.begin(), t_init.end());
        m.t_init_med = medianOf(t_init);
        m.t_init_max = *std::max_element(t_init.begin(), t_init.end());
        m.c_init_min = *std::min_element(c_init.begin(), c_init.end());
        m.c_init_med = medianOf(c_init);
        m.c_init_max = *std::max_element(c_init.begin(), c_init.end());
        m.c_final_min = *std::min_element(c_final.begin(), c_final.end());
        m.c_final_med = medianOf(c_final);
        m.c_final_max = *std::max_element(c_final.begin(), c_final.end());
        m.success = static_cast<double>(successes) / static_cast<double>(results.size());
        m.runs = results.size();
        return m;
    }

    double baseScore(double v_git, double v_eit, bool lower_is_better, double delta,
                     bool literal_base_score)
    {
        const bool git_inf = std::isinf(v_git);
        const bool eit_inf = std::isinf(v_eit);
        if (git_inf && eit_inf)
        {
            return 0.0;
        }
        if (git_inf != eit_inf)
        {
            // The finite side carries the improvement.
            return git_inf ? 2.0 * delta : -2.0 * delta;
        }
        const double denom = v_eit == 0.0 ? 1e-9 : std::abs(v_eit);
        const double alpha = (v_git - v_eit) / denom;
        if (literal_base_score)
        {
            return delta + delta * alpha;
        }
        const bool superior = lower_is_better ? (v_git < v_eit) : (v_git > v_eit);
        const double sign = superior ? -1.0 : 1.0;
        return sign * delta * (1.0 + std::abs(alpha));
    }

    double successBonus(double succ_git, double succ_eit, double delta, double bonus_low,
                        double bonus_high)
    {
        const double d = succ_git - succ_eit;
        if (d >= bonus_high)
        {
            return -2.0 * delta;
        }
        if (d > bonus_low)
        {
            return -delta;
        }
        return 0.0;
    }

    double totalScore(const RunMetrics &metrics_git, const RunMetrics &metrics_eit,
                      const RewardConfig &cfg)
    {
        const auto v_git = metrics_git.values();
        const auto v_eit = metrics_eit.values();
        double total = 0.0;
        for (std::size_t i = 0u; i < v_git.size(); ++i)
        {
            const bool lower_better = i != RunMetrics::kSuccessIndex;
            double score = baseScore(v_git[i], v_eit[i], lower_better, cfg.delta,
                                     cfg.literal_base_score);
            if (i == RunMetrics::kSuccessIndex)
            {
                score += successBonus(v_git[i], v_eit[i], cfg.delta, cfg.bonus_low,
                                      cfg.bonus_high);
            }
            total += score * cfg.weights[i];
        }
        return total;
    }

    double baselineTieScore(const RunMetrics &metrics_eit, const RewardConfig &cfg)
    {
        const auto v = metrics_eit.values();
        double total = 0.0;
        for (std::size_t i = 0u; i < v.size(); ++i)
        {
            if (!std::isinf(v[i]))
            {
                total += cfg.delta * cfg.weights[i];
            }
        }
        return total;
    }

    double fitness(std::vector<double> totals, std::size_t psi_size, const RewardConfig &cfg,
                   std::size_t *clamped)
    {
        if (totals.empty())
        {
            throw std::invalid_argument("fitness needs at least one total");
        }
        for (auto &t : totals)
        {
            if (t < cfg.total_clamp)
            {
                t = cfg.total_clamp;
                if (clamped != nullptr)
                {
                    ++(*clamped);
                }
            }
        }
        const double mean =
            std::accumulate(totals.begin(), totals.end(), 0.0) /
            static_cast<double>(totals.size());
        double variance = 0.0;
        for (const double t : totals)
        {
            variance += (t - mean) * (t - mean);
        }
        variance /= static_cast<double>(totals.size());
        return cfg.initial_score + mean + cfg.c1 * variance +
               cfg.c2 * static_cast<double>(psi_size);
    }

    void BenchmarkSet::validate() const
    {
        if (problems.empty())
        {
            throw std::invalid_argument("benchmark set is empty");
        }
        std::vector<bool> seen(problems.size(), false);
        for (const auto &segment : segments)
        {
            for (const std::size_t i : segment)
            {
                if (i >= problems.size() || seen[i])
                {
                    throw std::invalid_argument(
                        "segments must cover each problem exactly once");
                }
                seen[i] = true;
            }
        }
        if (std::find(seen.begin(), seen.end(), false) != seen.end())
        {
            throw std::invalid_argument("segments must cover every problem");
        }
    }

    std::vector<std::vector<std::size_t>> BenchmarkSet::trivialSegments(std::size_t n)
    {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), 0u);
        return {all};
    }

    RunMetrics evaluatePlanner(const PlannerSetup &setup, const BenchmarkProblem &bench,
                               const PlannerConfig &base_config, std::size_t jobs,
                               std::vector<PlanResult> *raw_results)
    {
        if (bench.runs < 1u)
        {
            throw std::invalid_argument("evaluatePlanner needs runs >= 1");
        }
        PlannerConfig config = base_config;
        config.key_mode = setup.mode;
        config.evolved = setup.evolved;
        config.time_limit_s = bench.time_limit_s;
        config.batch_budget = bench.batch_budget;

        std::vector<PlanResult> results(bench.runs);
        parallelFor(bench.runs, jobs, [&](std::size_t i) {
            results[i] = plan(bench.problem, config, bench.seed_base + i);
        });
        const RunMetrics metrics = aggregateMetrics(results);
        if (raw_results != nullptr)
        {
            *raw_results = std::move(results);
        }
        return metrics;
    }

    std::vector<RunMetrics> baselineMetrics(const BenchmarkSet &benchmark,
                                            const PlannerConfig &base_config,
                                            std::size_t jobs)
    {
        std::vector<RunMetrics> cache(benchmark.problems.size());
        for (std::size_t i = 0u; i < benchmark.problems.size(); ++i)
        {
            cache[i] = evaluatePlanner(PlannerSetup{KeyMode::Baseline, std::nullopt},
                                       benchmark.problems[i], base_config, jobs);
        }
        return cache;
    }

    double segmentedEvaluate(const ExprIndividual &individual, const BenchmarkSet &benchmark,
                             const std::vector<RunMetrics> &baseline_cache,
                             const RewardConfig &cfg, const PlannerConfig &base_config,
                             std::size_t *clamped)
    {
        if (baseline_cache.size() != benchmark.problems.size())
        {
            throw std::invalid_argument("baseline cache does not match the benchmark");
        }
        const PlannerSetup setup{KeyMode::EvolvedFile, individual};
        std::vector<double> totals;
        std::vector<double> tie_totals;
        totals.reserve(benchmark.problems.size());

        for (std::size_t s = 0u; s < benchmark.segments.size(); ++s)
        {
            for (const std::size_t i : benchmark.segments[s])
            {
                const RunMetrics metrics =
                    evaluatePlanner(setup, benchmark.problems[i], base_config);
                totals.push_back(totalScore(metrics, baseline_cache[i], cfg));
                tie_totals.push_back(baselineTieScore(baseline_cache[i], cfg));
            }
            if (s + 1u == benchmark.segments.size())
            {
                break;
            }
            // Early abort on a partial score clearly behind a par planner;
            // the partial fitness stands in for the rest of the benchmark.
            const double mean_total =
                std::accumulate(totals.begin(), totals.end(), 0.0) /
                static_cast<double>(totals.size());
            const double mean_tie =
                std::accumulate(tie_totals.begin(), tie_totals.end(), 0.0) /
                static_cast<double>(tie_totals.size());
            if (mean_tie > 0.0 && mean_total > cfg.abort_margin * mean_tie)
            {
                return fitness(std::move(totals), individual.size(), cfg, clamped);
            }
        }
        return fitness(std::move(totals), individual.size(), cfg, clamped);
    }

    TrainResult trainRGP(const BenchmarkSet &benchmark, const GpParams &gp_params,
                         const RewardConfig &reward_cfg, const PlannerConfig &base_config,
                         std::uint64_t seed, std::size_t jobs, const GenerationSink &sink)
    {
        benchmark.validate();
        if (gp_params.population_size < 2u || gp_params.generations < 1u)
        {
            throw std::invalid_argument("training needs population >= 2 and >= 1 generation");
        }

        const std::vector<RunMetrics> baseline_cache =
            baselineMetrics(benchmark, base_config, jobs);

        std::mt19937_64 rng(seed);
        Population population = initPopulation(gp_params.population_size, rng, gp_params);

        TrainResult result;
        std::optional<double> best_rho;

        for (std::size_t gen = 0u; gen < gp_params.generations; ++gen)
        {
            std::vector<std::size_t> clamp_counts(population.size(), 0u);
            parallelFor(population.size(), jobs, [&](std::size_t i) {
                if (!population[i].fitness.has_value())
                {
                    population[i].fitness =
                        segmentedEvaluate(population[i], benchmark, baseline_cache,
                                          reward_cfg, base_config, &clamp_counts[i]);
                }
            });
            for (const auto c : clamp_counts)
            {
                result.clamped_totals += c;
            }

            GenerationStats stats;
            stats.generation = gen;
            stats.min_rho = kInf;
            stats.max_rho = -kInf;
            double sum = 0.0;
            std::size_t best_index = 0u;
            for (std::size_t i = 0u; i < population.size(); ++i)
            {
                const double rho = *population[i].fitness;
                sum += rho;
                stats.max_rho = std::max(stats.max_rho, rho);
                if (rho < stats.min_rho)
                {
                    stats.min_rho = rho;
                    best_index = i;
                }
            }
            stats.mean_rho = sum / static_cast<double>(population.size());
            if (!best_rho.has_value() || stats.min_rho < *best_rho)
            {
                best_rho = stats.min_rho;
                result.best = population[best_index];
            }
            stats.best_rho_so_far = *best_rho;
            result.generations.push_back(stats);
            if (sink)
            {
                sink(stats);
            }

            if (gen + 1u == gp_params.generations)
            {
                break;
            }

            Population next;
            next.reserve(population.size());
            next.push_back(population[best_index]);  // elitism of one
            while (next.size() < population.size())
            {
                const auto &p1 = population[tournamentSelect(
                    population, gp_params.tournament_size, rng)];
                const auto &p2 = population[tournamentSelect(
                    population, gp_params.tournament_size, rng)];
                ExprIndividual child =
                    subtreeCrossover(p1, p2, gp_params.crossover_rate, rng, gp_params);
                child = pointMutate(child, gp_params.mutation_rate, rng, gp_params);
                child.fitness.reset();
                next.push_back(std::move(child));
            }
            population = std::move(next);
        }
        return result;
    }
}  // namespace gitstar
