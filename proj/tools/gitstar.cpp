#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gitstar/io.hpp"
#include "gitstar/planner.hpp"
#include "gitstar/reward.hpp"
#include "gitstar/world.hpp"

namespace
{
    constexpr int kExitOk = 0;
    constexpr int kExitUsage = 2;
    constexpr int kExitIo = 3;
    constexpr int kExitInternal = 4;

    std::uint64_t defaultSeed(std::optional<std::uint64_t> flag_seed)
    {
        if (flag_seed.has_value())
        {
            return *flag_seed;
        }
        if (const char *env = std::getenv("GITSTAR_SEED"))
        {
            return std::stoull(env);
        }
        return 0u;
    }

    std::string renderValue(double v)
    {
        if (std::isinf(v))
        {
            return "inf";
        }
        std::ostringstream out;
        out << v;
        return out.str();
    }

    gitstar::ScenarioParams parseScenarioParams(const std::vector<std::string> &pairs)
    {
        gitstar::ScenarioParams params;
        for (const auto &pair : pairs)
        {
            const auto eq = pair.find('=');
            if (eq == std::string::npos)
            {
                throw std::invalid_argument("--params expects key=value, got '" + pair + "'");
            }
            const std::string key = pair.substr(0u, eq);
            const std::string value = pair.substr(eq + 1u);
            if (key == "sealed")
            {
                params.sealed = value == "true" || value == "1";
            }
            else if (key == "goal_width")
            {
                params.goal_width = std::stod(value);
            }
            else if (key == "rect_count")
            {
                params.rect_count = std::stoull(value);
            }
            else if (key == "rect_min_width")
            {
                params.rect_min_width = std::stod(value);
            }
            else if (key == "rect_max_width")
            {
                params.rect_max_width = std::stod(value);
            }
            else if (key == "enclosure_wall")
            {
                params.enclosure_wall = std::stod(value);
            }
            else if (key == "enclosure_half_extent")
            {
                params.enclosure_half_extent = std::stod(value);
            }
            else
            {
                throw std::invalid_argument("unknown scenario parameter '" + key + "'");
            }
        }
        return params;
    }

    struct KeyChoice
    {
        std::string id;
        gitstar::PlannerSetup setup;
    };

    KeyChoice parseKeyChoice(const std::string &spec)
    {
        if (spec == "git")
        {
            return {"git", {gitstar::KeyMode::GitStarWinner, std::nullopt}};
        }
        if (spec == "baseline")
        {
            return {"baseline", {gitstar::KeyMode::Baseline, std::nullopt}};
        }
        if (spec.rfind("file:", 0u) == 0u)
        {
            const std::string path = spec.substr(5u);
            return {"file:" + path,
                    {gitstar::KeyMode::EvolvedFile, gitstar::loadHeuristic(path)}};
        }
        throw std::invalid_argument("--key must be git, baseline, or file:PATH");
    }

    int runWorldgen(const std::string &kind_name, int dimension, std::uint64_t seed,
                    const std::string &out_path, const std::vector<std::string> &param_pairs)
    {
        const auto kind = gitstar::scenarioFromName(kind_name);
        if (!kind.has_value())
        {
            throw std::invalid_argument("unknown scenario kind '" + kind_name + "'");
        }
        const auto params = parseScenarioParams(param_pairs);
        const auto problem = gitstar::generateScenario(*kind, dimension, seed, params);
        gitstar::saveProblem(out_path, problem);
        std::cout << "wrote " << out_path << " (" << problem.obstacles.size()
                  << " obstacles)\n";
        return kExitOk;
    }

    int runPlan(const std::string &problem_path, const std::string &key_spec,
                double time_limit, std::optional<std::uint64_t> batch_budget,
                std::uint64_t seed, const std::string &out_path,
                const std::string &path_out)
    {
        const auto problem = gitstar::loadProblem(problem_path);
        const KeyChoice key = parseKeyChoice(key_spec);

        gitstar::PlannerConfig config;
        config.key_mode = key.setup.mode;
        config.evolved = key.setup.evolved;
        config.time_limit_s = time_limit;
        config.batch_budget = batch_budget;

        const auto result = gitstar::plan(problem, config, seed);

        if (!out_path.empty())
        {
            std::ofstream out(out_path);
            if (!out)
            {
                throw std::runtime_error("cannot open for writing: " + out_path);
            }
            out << gitstar::runRecordToJson(key.id, problem_path, seed, result).dump()
                << "\n";
        }
        if (!path_out.empty() && result.path.has_value())
        {
            std::ofstream out(path_out);
            if (!out)
            {
                throw std::runtime_error("cannot open for writing: " + path_out);
            }
            nlohmann::json j = {{"cost", result.path->cost},
                                {"states", result.path->states}};
            out << j.dump(2) << "\n";
        }
        std::cout << "t_init=" << renderValue(result.t_init)
                  << " c_init=" << renderValue(result.c_init)
                  << " c_final=" << renderValue(result.c_final)
                  << " success=" << (result.success ? 1 : 0) << "\n";
        return kExitOk;
    }

    int runBench(const std::string &benchmark_path, const std::vector<std::string> &key_specs,
                 const std::string &out_dir, std::size_t jobs)
    {
        const auto benchmark = gitstar::loadBenchmark(benchmark_path);
        std::vector<KeyChoice> keys;
        for (const auto &spec : key_specs)
        {
            keys.push_back(parseKeyChoice(spec));
        }

        std::ofstream csv(out_dir + "/metrics.csv");
        std::ofstream jsonl(out_dir + "/runs.jsonl");
        if (!csv || !jsonl)
        {
            throw std::runtime_error("cannot open outputs under " + out_dir);
        }
        csv << gitstar::metricsCsvHeader() << "\n";

        gitstar::PlannerConfig base_config;
        std::size_t failures = 0u;
        // metrics[key][problem]
        std::vector<std::vector<gitstar::RunMetrics>> metrics(
            keys.size(), std::vector<gitstar::RunMetrics>(benchmark.problems.size()));

        for (std::size_t k = 0u; k < keys.size(); ++k)
        {
            for (std::size_t p = 0u; p < benchmark.problems.size(); ++p)
            {
                const auto &bench = benchmark.problems[p];
                std::vector<gitstar::PlanResult> raw;
                metrics[k][p] =
                    gitstar::evaluatePlanner(keys[k].setup, bench, base_config, jobs, &raw);
                csv << gitstar::metricsCsvRow(keys[k].id, bench.name, metrics[k][p]) << "\n";
                for (std::size_t r = 0u; r < raw.size(); ++r)
                {
                    jsonl << gitstar::runRecordToJson(keys[k].id, bench.name,
                                                      bench.seed_base + r, raw[r])
                                 .dump()
                          << "\n";
                    if (!raw[r].success)
                    {
                        ++failures;
                    }
                }
            }
        }

        // Median-t_init improvement of git over baseline, Table-style.
        const auto git_it =
            std::find_if(keys.begin(), keys.end(),
                         [](const KeyChoice &k) { return k.id == "git"; });
        const auto base_it =
            std::find_if(keys.begin(), keys.end(),
                         [](const KeyChoice &k) { return k.id == "baseline"; });
        if (git_it != keys.end() && base_it != keys.end())
        {
            std::ofstream improvement(out_dir + "/improvement.csv");
            improvement << "problem,t_init_med_improvement_pct\n";
            const std::size_t gi = static_cast<std::size_t>(git_it - keys.begin());
            const std::size_t bi = static_cast<std::size_t>(base_it - keys.begin());
            for (std::size_t p = 0u; p < benchmark.problems.size(); ++p)
            {
                const double git_med = metrics[gi][p].t_init_med;
                const double base_med = metrics[bi][p].t_init_med;
                double pct = std::numeric_limits<double>::quiet_NaN();
                if (std::isfinite(git_med) && std::isfinite(base_med) && base_med > 0.0)
                {
                    pct = 100.0 * (base_med - git_med) / base_med;
                }
                improvement << benchmark.problems[p].name << ","
                            << (std::isnan(pct) ? "nan" : std::to_string(pct)) << "\n";
            }
        }

        if (failures > 0u)
        {
            std::cerr << "warning: " << failures << " unsuccessful runs (recorded)\n";
        }
        std::cout << "wrote " << out_dir << "/metrics.csv and runs.jsonl\n";
        return kExitOk;
    }

    int runTrain(const std::string &benchmark_path, gitstar::GpParams gp,
                 gitstar::RewardConfig reward, std::uint64_t seed,
                 const std::string &out_dir, std::size_t jobs, bool desk_preset)
    {
        if (desk_preset)
        {
            gp.population_size = 30u;
            gp.generations = 8u;
        }
        if (gp.population_size < 2u)
        {
            throw std::invalid_argument("population size must be at least 2");
        }
        const auto benchmark = gitstar::loadBenchmark(benchmark_path);

        std::ofstream generations(out_dir + "/generations.csv");
        if (!generations)
        {
            throw std::runtime_error("cannot open outputs under " + out_dir);
        }
        generations << "gen,min_rho,mean_rho,max_rho\n";

        gitstar::PlannerConfig base_config;
        const auto result = gitstar::trainRGP(
            benchmark, gp, reward, base_config, seed, jobs,
            [&generations](const gitstar::GenerationStats &stats) {
                generations << stats.generation << "," << stats.min_rho << ","
                            << stats.mean_rho << "," << stats.max_rho << "\n";
                std::cout << "gen " << stats.generation << ": min=" << stats.min_rho
                          << " mean=" << stats.mean_rho << " max=" << stats.max_rho
                          << " best=" << stats.best_rho_so_far << "\n";
            });

        gitstar::saveHeuristic(out_dir + "/winner.heuristic", result.best);
        if (result.clamped_totals > 0u)
        {
            std::cerr << "note: " << result.clamped_totals
                      << " totals clamped at the fitness floor\n";
        }
        std::cout << "wrote " << out_dir << "/winner.heuristic and generations.csv\n";
        return kExitOk;
    }
}  // namespace

int main(int argc, char **argv)
{
    CLI::App app{"GIT* planner, benchmark, and heuristic training harness"};
    app.require_subcommand(1);

    // worldgen
    auto *worldgen = app.add_subcommand("worldgen", "Generate a problem JSON file");
    std::string wg_kind;
    int wg_dim = 2;
    std::optional<std::uint64_t> wg_seed;
    std::string wg_out = "problem.json";
    std::vector<std::string> wg_params;
    worldgen->add_option("--kind", wg_kind, "dw | rr | ge")->required();
    worldgen->add_option("--dim", wg_dim, "dimension (>= 2)")->required();
    worldgen->add_option("--seed", wg_seed, "generator seed");
    worldgen->add_option("--out", wg_out, "output path")->required();
    worldgen->add_option("--params", wg_params, "key=value scenario parameters");

    // plan
    auto *plan_cmd = app.add_subcommand("plan", "Run the planner on a problem file");
    std::string pl_problem, pl_key = "git", pl_out, pl_path_out;
    double pl_time = 1.0;
    std::optional<std::uint64_t> pl_budget, pl_seed;
    plan_cmd->add_option("--problem", pl_problem, "problem JSON file")->required();
    plan_cmd->add_option("--key", pl_key, "git | baseline | file:PATH");
    plan_cmd->add_option("--time-limit", pl_time, "seconds");
    plan_cmd->add_option("--batch-budget", pl_budget, "batches (deterministic mode)");
    plan_cmd->add_option("--seed", pl_seed, "run seed");
    plan_cmd->add_option("--out", pl_out, "JSONL run record path");
    plan_cmd->add_option("--path-out", pl_path_out, "solution path JSON");

    // bench
    auto *bench_cmd = app.add_subcommand("bench", "Benchmark planners on a problem set");
    std::string be_benchmark, be_out_dir = ".";
    std::vector<std::string> be_keys = {"git", "baseline"};
    std::size_t be_jobs = 1u;
    bench_cmd->add_option("--benchmark", be_benchmark, "benchmark JSON file")->required();
    bench_cmd->add_option("--key", be_keys, "planner keys (repeatable)");
    bench_cmd->add_option("--out-dir", be_out_dir, "output directory");
    bench_cmd->add_option("--jobs", be_jobs, "worker threads");

    // train
    auto *train_cmd = app.add_subcommand("train", "Evolve a G-heuristic on a benchmark");
    std::string tr_benchmark, tr_out_dir = ".";
    gitstar::GpParams tr_gp;
    gitstar::RewardConfig tr_reward;
    std::optional<std::uint64_t> tr_seed;
    std::size_t tr_jobs = 1u;
    bool tr_desk = false;
    train_cmd->add_option("--benchmark", tr_benchmark, "benchmark JSON file")->required();
    train_cmd->add_option("--pop", tr_gp.population_size, "population size");
    train_cmd->add_option("--gens", tr_gp.generations, "generations");
    train_cmd->add_option("--pc", tr_gp.crossover_rate, "crossover rate");
    train_cmd->add_option("--pm", tr_gp.mutation_rate, "mutation rate");
    train_cmd->add_option("--tourn", tr_gp.tournament_size, "tournament size");
    train_cmd->add_option("--depth", tr_gp.max_depth, "max tree depth");
    train_cmd->add_option("--delta", tr_reward.delta, "reward step");
    train_cmd->add_option("--c1", tr_reward.c1, "variance coefficient");
    train_cmd->add_option("--c2", tr_reward.c2, "size coefficient");
    train_cmd->add_option("--abort-margin", tr_reward.abort_margin, "segmented abort margin");
    train_cmd->add_option("--seed", tr_seed, "training seed");
    train_cmd->add_option("--out-dir", tr_out_dir, "output directory");
    train_cmd->add_option("--jobs", tr_jobs, "worker threads");
    std::string tr_preset;
    train_cmd->add_option("--preset", tr_preset, "desk (pop 30, gens 8)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try
    {
        if (worldgen->parsed())
        {
            return runWorldgen(wg_kind, wg_dim, defaultSeed(wg_seed), wg_out, wg_params);
        }
        if (plan_cmd->parsed())
        {
            return runPlan(pl_problem, pl_key, pl_time, pl_budget, defaultSeed(pl_seed),
                           pl_out, pl_path_out);
        }
        if (bench_cmd->parsed())
        {
            return runBench(be_benchmark, be_keys, be_out_dir, be_jobs);
        }
        if (train_cmd->parsed())
        {
            if (!tr_preset.empty() && tr_preset != "desk")
            {
                throw std::invalid_argument("unknown preset '" + tr_preset + "'");
            }
            tr_desk = tr_preset == "desk";
            return runTrain(tr_benchmark, tr_gp, tr_reward, defaultSeed(tr_seed), tr_out_dir,
                            tr_jobs, tr_desk);
        }
    }
    catch (const std::invalid_argument &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    catch (const std::logic_error &e)
    {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
