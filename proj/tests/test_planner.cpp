#include <doctest.h>

#include <cmath>
#include <queue>
#include <random>

#include "gitstar/planner.hpp"
#include "gitstar/world.hpp"

using namespace gitstar;

namespace
{
    constexpr double kInf = std::numeric_limits<double>::infinity();

    ProblemInstance twoStateWorld()
    {
        ProblemInstance problem;
        problem.dimension = 2;
        problem.start = {0.3, 0.5};
        problem.goal_box = {{0.65, 0.45}, {0.75, 0.55}};
        problem.scenario_id = ScenarioKind::Custom;
        return problem;
    }

    // Reference shortest-path distances from the source over an explicit
    // edge-predicate graph.
    std::vector<double> dijkstra(const std::vector<StateVec> &states,
                                 const std::vector<std::size_t> &nodes, std::size_t source,
                                 double radius,
                                 const std::function<bool(std::size_t, std::size_t)> &edge_ok)
    {
        std::vector<double> dist(states.size(), kInf);
        dist[source] = 0.0;
        using Item = std::pair<double, std::size_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
        queue.push({0.0, source});
        while (!queue.empty())
        {
            const auto [d, u] = queue.top();
            queue.pop();
            if (d > dist[u])
            {
                continue;
            }
            for (const std::size_t w : nodes)
            {
                if (w == u)
                {
                    continue;
                }
                const double c = distance(states[u], states[w]);
                if (c > radius || !edge_ok(u, w))
                {
                    continue;
                }
                if (d + c < dist[w] - 1e-15)
                {
                    dist[w] = d + c;
                    queue.push({dist[w], w});
                }
            }
        }
        return dist;
    }
}

TEST_CASE("inflation factor: golden value, monotonicity, limit")
{
    CHECK(inflationFactor(4, 100u) == doctest::Approx(1.2170).epsilon(1e-4));
    const double expected =
        1.0 + (std::log(4.0) + 2.0) / (10.0 + std::log(100.0) + 1.0);
    CHECK(inflationFactor(4, 100u) == doctest::Approx(expected).epsilon(1e-12));

    for (int d = 2; d < 12; ++d)
    {
        CHECK(inflationFactor(d + 1, 500u) > inflationFactor(d, 500u));
    }
    CHECK(inflationFactor(4, 100000000u) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK_THROWS_AS(inflationFactor(0, 10u), std::invalid_argument);
}

TEST_CASE("truncation factor: golden value and limit")
{
    CHECK(truncationFactor(100u) == doctest::Approx(1.09425).epsilon(1e-4));
    CHECK(truncationFactor(100u) == doctest::Approx(1.0 + 3.0 * M_PI / 100.0).epsilon(1e-12));
    CHECK(truncationFactor(1000000000u) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(truncationFactor(200u) < truncationFactor(100u));
    CHECK_THROWS_AS(truncationFactor(0u), std::invalid_argument);
}

TEST_CASE("git key: worked context")
{
    EdgeContext ctx;
    ctx.g_hat_t = 5.0;
    ctx.u_t = M_E - 1.0;
    ctx.u_s = 0.0;
    ctx.w_dyn = 0.0;
    ctx.e_bar_s = 4.0;
    ctx.e_bar_edge = 5.0;
    ctx.d_bar_t = M_E;
    const auto key = gitKey(ctx);
    CHECK(key.first == doctest::Approx(1.8584073464).epsilon(1e-6));
    CHECK(key.second == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("git key: zero potential difference nulls the first component")
{
    EdgeContext ctx;
    ctx.g_hat_t = 7.3;
    ctx.u_t = 4.2;
    ctx.u_s = 4.2;
    ctx.w_dyn = 11.0;
    CHECK(gitKey(ctx).first == 0.0);
}

TEST_CASE("git key: first component decays toward zero in dynamic importance")
{
    EdgeContext ctx;
    ctx.g_hat_t = 6.0;
    ctx.u_t = 1.0;
    ctx.u_s = 0.0;
    double previous = std::abs(gitKey(ctx).first);
    for (double w = 1.0; w < 64.0; w *= 2.0)
    {
        ctx.w_dyn = w;
        const double current = std::abs(gitKey(ctx).first);
        CHECK(current < previous);
        previous = current;
    }
    CHECK(previous < 0.05);
}

TEST_CASE("git key: matches the serialized winner expression pair")
{
    const auto winner = winnerHeuristic();
    std::mt19937_64 rng(17u);
    std::uniform_real_distribution<double> unit(0.0, 3.0);
    for (int trial = 0; trial < 300; ++trial)
    {
        EdgeContext ctx;
        ctx.g_hat_t = unit(rng);
        ctx.u_s = unit(rng);
        ctx.u_t = unit(rng);
        ctx.w_dyn = std::floor(unit(rng) * 3.0);
        ctx.e_bar_s = std::floor(unit(rng) * 40.0);
        ctx.e_bar_edge = std::floor(unit(rng) * 20.0);
        ctx.d_bar_t = unit(rng) * 50.0;
        const auto native = gitKey(ctx);
        const auto expr = winner.evalKey(ctx);
        CHECK(native.first == doctest::Approx(expr.first).epsilon(1e-12));
        CHECK(native.second == doctest::Approx(expr.second).epsilon(1e-12));
    }
}

TEST_CASE("baseline key: golden values on a fixed five-state instance")
{
    // Five states on a line; contexts built by hand.
    const StateVec start{0.0, 0.0};
    const std::vector<StateVec> chain = {
        {0.0, 0.0}, {0.3, 0.0}, {0.3, 0.4}, {0.6, 0.4}, {0.6, 0.8}};
    double branch_effort = 0.0;
    const double res = 0.01;
    for (std::size_t i = 1u; i < chain.size(); ++i)
    {
        EdgeContext ctx;
        ctx.g_hat_t = distance(start, chain[i]);
        ctx.h_hat_t = 0.1;
        ctx.c_hat = distance(chain[i - 1u], chain[i]);
        ctx.e_bar_s = branch_effort;
        ctx.e_bar_edge = std::ceil(ctx.c_hat / res);
        const auto key = baselineKey(ctx);
        CHECK(key.first ==
              doctest::Approx(ctx.g_hat_t + ctx.c_hat + 0.1).epsilon(1e-12));
        CHECK(key.second == doctest::Approx(branch_effort + ctx.e_bar_edge).epsilon(1e-12));
        branch_effort += ctx.e_bar_edge;
    }

    // Monotone in the edge estimate with other fields held fixed.
    EdgeContext ctx;
    ctx.g_hat_t = 1.0;
    ctx.h_hat_t = 0.5;
    ctx.c_hat = 0.2;
    const double lo = baselineKey(ctx).first;
    ctx.c_hat = 0.3;
    CHECK(baselineKey(ctx).first > lo);
}

TEST_CASE("search tree: edges, rewiring, subtree removal, invariants")
{
    SearchTree tree;
    tree.reset(6u, 0u);
    const std::vector<StateVec> pts = {{0.0, 0.0}, {0.1, 0.0}, {0.2, 0.0},
                                       {0.3, 0.0}, {0.4, 0.0}, {0.5, 0.0}};
    auto cost = [&pts](std::size_t a, std::size_t b) { return distance(pts[a], pts[b]); };

    tree.setEdge(1u, 0u, 0.1, 1.0);
    tree.setEdge(2u, 1u, 0.2, 2.0);
    tree.setEdge(3u, 2u, 0.3, 3.0);
    tree.setEdge(4u, 2u, 0.4, 4.0);
    CHECK(tree.size() == 5u);
    CHECK(tree.parent(3u) == 2u);
    tree.checkInvariants(cost);

    // Rewire 2 under 0 directly.
    tree.setEdge(2u, 0u, 0.2, 2.0);
    CHECK(tree.parent(2u) == 0u);
    CHECK(tree.children(1u).empty());
    tree.recomputeLabels(cost, [](std::size_t, std::size_t) { return 1.0; });
    tree.checkInvariants(cost);

    tree.removeSubtree(2u);
    CHECK(tree.size() == 2u);
    CHECK_FALSE(tree.contains(3u));
    CHECK_FALSE(tree.contains(4u));
    CHECK(tree.g(3u) == kInf);
    tree.checkInvariants(cost);

    CHECK_THROWS_AS(tree.setEdge(0u, 1u, 0.0, 0.0), std::logic_error);
}

TEST_CASE("reverse search: two-state world adopts the start at its distance")
{
    PlannerConfig config;
    config.batch_size = 0u;
    GitStarPlanner planner(twoStateWorld(), config, 1u);
    planner.addBatch();
    planner.runReverseSearch();
    const auto &tree = planner.reverseTree();
    REQUIRE(tree.contains(planner.startId()));
    CHECK(tree.g(planner.startId()) == doctest::Approx(0.4).epsilon(1e-9));
    CHECK(tree.parent(planner.startId()) == planner.goalId());
}

TEST_CASE("reverse search: midpoint probe rejects a blocked edge")
{
    auto problem = twoStateWorld();
    problem.obstacles.push_back({{0.48, 0.0}, {0.52, 1.0}});
    PlannerConfig config;
    config.batch_size = 0u;
    GitStarPlanner planner(problem, config, 1u);
    planner.addBatch();
    planner.runReverseSearch();
    CHECK_FALSE(planner.reverseTree().contains(planner.startId()));
    CHECK(planner.invalidEdges().contains(planner.startId(), planner.goalId()));
}

TEST_CASE("reverse search: labels agree with Dijkstra on the probed graph")
{
    for (const std::uint64_t seed : {1u, 2u, 3u, 4u, 5u})
    {
        ScenarioParams params;
        params.rect_count = 6u;
        const auto problem =
            generateScenario(ScenarioKind::RandomRectangles, 2, 40u + seed, params);
        PlannerConfig config;
        config.batch_size = 20u;
        config.batch_budget = 1u;
        GitStarPlanner planner(problem, config, seed);
        planner.solve();  // establishes an incumbent when reachable
        planner.runReverseSearch();

        const auto &states = planner.states();
        std::vector<std::size_t> nodes;
        for (std::size_t id = 0u; id < states.size(); ++id)
        {
            if (planner.isActive(id))
            {
                nodes.push_back(id);
            }
        }

        // (a) Exact agreement with Dijkstra over the surviving sparse graph.
        auto admitted = [&](std::size_t a, std::size_t b) {
            return !planner.invalidEdges().contains(a, b);
        };
        const auto sparse = dijkstra(states, nodes, planner.goalId(), planner.radius(),
                                     admitted);
        const auto &tree = planner.reverseTree();
        for (const std::size_t id : nodes)
        {
            if (tree.contains(id))
            {
                CHECK(tree.g(id) == doctest::Approx(sparse[id]).epsilon(1e-9));
            }
            else
            {
                CHECK(sparse[id] == kInf);
            }
        }

        // (b) Labels never beat full validation: the lazy tree lower-bounds
        // the cost over fully validated edges.
        auto validated = [&](std::size_t a, std::size_t b) {
            return isEdgeValid(problem, states[a], states[b], planner.resolution());
        };
        const auto valid =
            dijkstra(states, nodes, planner.goalId(), planner.radius(), validated);
        for (const std::size_t id : nodes)
        {
            if (std::isfinite(valid[id]))
            {
                REQUIRE(tree.contains(id));
                CHECK(tree.g(id) <= valid[id] + 1e-9);
            }
        }
    }
}

TEST_CASE("forward search: obstacle-free world solves on the first batch")
{
    ScenarioParams params;
    params.rect_count = 0u;
    const auto problem = generateScenario(ScenarioKind::RandomRectangles, 2, 8u, params);
    PlannerConfig config;
    config.batch_budget = 1u;
    const auto result = plan(problem, config, 3u);
    REQUIRE(result.success);
    const double straight = distance(problem.start, problem.goalCenter());
    CHECK(result.c_init >= straight - 1e-9);
    CHECK(result.c_init <= 2.0 * straight);
    REQUIRE(result.path.has_value());
    CHECK(result.path->states.front() == problem.start);
    CHECK(problem.goal_box.contains(result.path->states.back()));
    CHECK(result.path->cost ==
          doctest::Approx(result.path->recomputeCost()).epsilon(1e-9));
}

TEST_CASE("forward search: full-resolution conflicts are repaired on dividing walls")
{
    const auto problem = generateScenario(ScenarioKind::DividingWalls, 2, 0u);
    PlannerConfig config;
    config.batch_budget = 3u;
    for (const std::uint64_t seed : {1u, 2u, 3u})
    {
        const auto result = plan(problem, config, seed);
        CHECK(result.success);
    }
}

TEST_CASE("planner: anytime costs strictly decrease and paths stay sound")
{
    const auto problem = generateScenario(ScenarioKind::RandomRectangles, 2, 12u);
    PlannerConfig config;
    config.batch_budget = 8u;
    const auto result = plan(problem, config, 5u);
    REQUIRE(result.success);
    REQUIRE(!result.improvements.empty());
    for (std::size_t i = 1u; i < result.improvements.size(); ++i)
    {
        CHECK(result.improvements[i].cost < result.improvements[i - 1u].cost);
        CHECK(result.improvements[i].t >= result.improvements[i - 1u].t);
    }
    CHECK(result.c_final == result.improvements.back().cost);
    CHECK(result.c_init == result.improvements.front().cost);

    // Returned path revalidates at 10x finer resolution.
    const auto &path = result.path.value();
    const double fine = defaultEdgeResolution(problem.dimension) / 10.0;
    for (std::size_t i = 1u; i < path.states.size(); ++i)
    {
        CHECK(isEdgeValid(problem, path.states[i - 1u], path.states[i], fine));
    }
}

TEST_CASE("planner: progress sink sees every improvement in order")
{
    const auto problem = generateScenario(ScenarioKind::RandomRectangles, 2, 12u);
    PlannerConfig config;
    config.batch_budget = 5u;
    std::vector<Improvement> seen;
    const auto result =
        plan(problem, config, 5u, [&seen](const Improvement &imp) { seen.push_back(imp); });
    REQUIRE(seen.size() == result.improvements.size());
    for (std::size_t i = 0u; i < seen.size(); ++i)
    {
        CHECK(seen[i].cost == result.improvements[i].cost);
        CHECK(seen[i].t == result.improvements[i].t);
    }
}

TEST_CASE("planner: batch-budget runs are deterministic")
{
    const auto problem = generateScenario(ScenarioKind::RandomRectangles, 3, 6u);
    PlannerConfig config;
    config.batch_budget = 4u;
    const auto a = plan(problem, config, 11u);
    const auto b = plan(problem, config, 11u);
    CHECK(a.success == b.success);
    CHECK(a.t_init == b.t_init);
    CHECK(a.c_init == b.c_init);
    CHECK(a.c_final == b.c_final);
    CHECK(a.state_checks == b.state_checks);
    REQUIRE(a.improvements.size() == b.improvements.size());
    for (std::size_t i = 0u; i < a.improvements.size(); ++i)
    {
        CHECK(a.improvements[i].t == b.improvements[i].t);
        CHECK(a.improvements[i].cost == b.improvements[i].cost);
    }
}

TEST_CASE("prune: idempotent, informed, and replanning survives it")
{
    const auto problem = generateScenario(ScenarioKind::RandomRectangles, 2, 9u);
    PlannerConfig config;
    config.batch_budget = 6u;
    GitStarPlanner planner(problem, config, 2u);
    auto result = planner.solve();
    REQUIRE(result.success);

    // improveForward prunes after its improvements, so a fresh call removes
    // nothing new.
    CHECK(planner.pruneNow() == 0u);

    const double incumbent = planner.incumbentCost();
    const auto &states = planner.states();
    for (std::size_t id = 2u; id < states.size(); ++id)
    {
        if (planner.isActive(id))
        {
            CHECK(distance(states[id], problem.start) +
                      problem.goal_box.distanceTo(states[id]) <
                  incumbent);
        }
    }

    // Replanning after prune keeps working and never regresses.
    planner.addBatch();
    planner.runReverseSearch();
    planner.improveForward();
    CHECK(planner.incumbentCost() <= incumbent + 1e-12);
}

TEST_CASE("planner: sealed enclosure fails cleanly with statistics")
{
    ScenarioParams params;
    params.sealed = true;
    const auto problem = generateScenario(ScenarioKind::GoalEnclosure, 2, 4u, params);
    PlannerConfig config;
    config.batch_budget = 3u;
    const auto result = plan(problem, config, 1u);
    CHECK_FALSE(result.success);
    CHECK(result.t_init == kInf);
    CHECK(result.c_init == kInf);
    CHECK(result.c_final == kInf);
    CHECK(result.improvements.empty());
    CHECK(result.state_checks > 0u);
    CHECK(result.batches == 3u);
}

TEST_CASE("planner: forward tree invariants hold after a full run")
{
    const auto problem = generateScenario(ScenarioKind::DividingWalls, 2, 0u);
    PlannerConfig config;
    config.batch_budget = 4u;
    GitStarPlanner planner(problem, config, 7u);
    planner.solve();
    const auto &states = planner.states();
    planner.forwardTree().checkInvariants(
        [&states](std::size_t a, std::size_t b) { return distance(states[a], states[b]); });
}

TEST_CASE("planner: effort estimates agree with the context bindings")
{
    const auto problem = generateScenario(ScenarioKind::RandomRectangles, 2, 14u);
    PlannerConfig config;
    config.batch_budget = 2u;
    GitStarPlanner planner(problem, config, 3u);
    planner.addBatch();
    planner.runReverseSearch();
    const auto &tree = planner.reverseTree();
    std::size_t checked = 0u;
    for (std::size_t s = 0u; s < planner.states().size() && checked < 25u; ++s)
    {
        if (!tree.contains(s) || s == planner.goalId())
        {
            continue;
        }
        const std::size_t t = planner.startId();
        const auto [branch, edge, remaining] = planner.effortEstimates(s, t);
        CHECK(branch == doctest::Approx(tree.effort(s)).epsilon(1e-12));
        const auto ctx = planner.edgeContext(s, t);
        CHECK(ctx.e_bar_s == doctest::Approx(branch));
        CHECK(ctx.e_bar_edge == doctest::Approx(edge));
        CHECK(ctx.d_bar_t == doctest::Approx(remaining));
        CHECK(ctx.d_bar_t == 0.0);  // the start needs no further effort
        ++checked;
    }
    CHECK(checked > 0u);
    CHECK_THROWS_AS(planner.effortEstimates(planner.states().size() - 1u, 0u),
                    std::invalid_argument);
}

TEST_CASE("planner: evolved-file mode with the winner pair plans successfully")
{
    const auto problem = generateScenario(ScenarioKind::RandomRectangles, 2, 21u);
    PlannerConfig config;
    config.batch_budget = 3u;
    config.key_mode = KeyMode::EvolvedFile;
    config.evolved = winnerHeuristic();
    const auto result = plan(problem, config, 2u);
    CHECK(result.success);

    PlannerConfig missing;
    missing.key_mode = KeyMode::EvolvedFile;
    CHECK_THROWS_AS(GitStarPlanner(problem, missing, 1u), std::invalid_argument);
}
