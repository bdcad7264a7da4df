#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gitstar/heuristics.hpp"
#include "gitstar/sampling.hpp"
#include "gitstar/world.hpp"

using namespace gitstar;

namespace
{
    ProblemInstance emptyWorld(int dimension)
    {
        ScenarioParams params;
        params.rect_count = 0u;
        return generateScenario(ScenarioKind::RandomRectangles, dimension, 1u, params);
    }
}

TEST_CASE("rgg radius: direct evaluation of the bound")
{
    // Independent recomputation: zeta_4 = pi^2 / 2, natural log.
    const double zeta4 = M_PI * M_PI / 2.0;
    const double term = 2.0 * (1.0 + 0.25) * (1.0 / zeta4) * (std::log(100.0) / 100.0);
    const double expected = 1.001 * std::pow(term, 0.25);
    CHECK(rggRadius(100u, 4, 1.0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(rggRadius(100u, 4, 1.0) == doctest::Approx(0.391).epsilon(2e-3));
}

TEST_CASE("rgg radius: strictly decreasing in q")
{
    double previous = rggRadius(3u, 4, 1.0);
    for (std::size_t q = 4u; q <= 200u; ++q)
    {
        const double current = rggRadius(q, 4, 1.0);
        CHECK(current < previous);
        previous = current;
    }
}

TEST_CASE("rgg radius: homogeneity in the informed measure")
{
    for (const int d : {2, 3, 4, 8})
    {
        const double full = rggRadius(500u, d, 1.0);
        const double half = rggRadius(500u, d, 0.5);
        CHECK(half == doctest::Approx(full * std::pow(2.0, -1.0 / d)).epsilon(1e-12));
    }
}

TEST_CASE("rgg radius: q below 2 is a contract violation")
{
    CHECK_THROWS_AS(rggRadius(1u, 2, 1.0), std::invalid_argument);
}

TEST_CASE("unit ball volumes")
{
    CHECK(unitBallVolume(2) == doctest::Approx(M_PI).epsilon(1e-12));
    CHECK(unitBallVolume(3) == doctest::Approx(4.0 / 3.0 * M_PI).epsilon(1e-12));
    CHECK(unitBallVolume(4) == doctest::Approx(M_PI * M_PI / 2.0).epsilon(1e-12));
}

TEST_CASE("sample batch: obstacle-free world leaves no invalid samples")
{
    const auto problem = emptyWorld(3);
    SampleStore store;
    std::mt19937_64 rng(5u);
    const auto accepted = sampleBatch(problem, store, rng);
    CHECK(accepted == store.batch_size);
    CHECK(store.valid_samples.size() == store.batch_size);
    CHECK(store.invalid_samples.empty());
    CHECK(store.total_drawn == store.batch_size);
}

TEST_CASE("sample batch: acceptance ratio tracks free volume")
{
    // Exactly half the cube is blocked.
    ProblemInstance problem = emptyWorld(2);
    problem.obstacles.push_back({{0.0, 0.5}, {1.0, 1.0}});
    SampleStore store;
    std::mt19937_64 rng(11u);
    for (int batch = 0; batch < 50; ++batch)
    {
        sampleBatch(problem, store, rng);
    }
    const double ratio = static_cast<double>(store.valid_samples.size()) /
                         static_cast<double>(store.total_drawn);
    CHECK(ratio == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("sample batch: informed rejection keeps only potential improvers")
{
    const auto problem = generateScenario(ScenarioKind::RandomRectangles, 2, 9u);
    SampleStore store;
    std::mt19937_64 rng(3u);
    const double incumbent = 0.9;
    sampleBatch(problem, store, rng, incumbent);
    for (const auto &x : store.valid_samples)
    {
        CHECK(gHat(problem, x) + hHat(problem, x) < incumbent);
    }
    // Rejected-by-informed-set draws are never validity checked, so every
    // recorded invalid sample also lies inside the informed set.
    for (const auto &x : store.invalid_samples)
    {
        CHECK(gHat(problem, x) + hHat(problem, x) < incumbent);
    }
    CHECK(store.total_drawn ==
          store.valid_samples.size() + store.invalid_samples.size());
}

TEST_CASE("sample batch: draw cap raises sampling exhausted")
{
    const auto problem = emptyWorld(2);
    SampleStore store;
    store.draw_cap_per_batch = 50u;
    std::mt19937_64 rng(1u);
    // An incumbent below the geometric minimum empties the informed set.
    CHECK_THROWS_AS(sampleBatch(problem, store, rng, 1e-6), SamplingExhausted);
}

TEST_CASE("neighbor index: exact agreement with a linear scan")
{
    std::mt19937_64 rng(21u);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const int d : {2, 3, 5})
    {
        std::vector<StateVec> states;
        std::vector<std::size_t> ids;
        for (std::size_t i = 0u; i < 500u; ++i)
        {
            StateVec x(static_cast<std::size_t>(d));
            for (auto &v : x)
            {
                v = unit(rng);
            }
            states.push_back(std::move(x));
            ids.push_back(i);
        }
        const double radius = 0.15;
        NeighborIndex index;
        index.rebuild(states, ids, radius);

        for (int trial = 0; trial < 100; ++trial)
        {
            std::uniform_int_distribution<std::size_t> pick(0u, states.size() - 1u);
            const std::size_t q = pick(rng);
            auto got = index.query(states[q], q);
            std::vector<std::size_t> expected;
            for (std::size_t i = 0u; i < states.size(); ++i)
            {
                if (i != q && distance(states[i], states[q]) <= radius)
                {
                    expected.push_back(i);
                }
            }
            std::sort(got.begin(), got.end());
            CHECK(got == expected);
        }
    }
}

TEST_CASE("neighbors: tree links union in, invalid edges drop out")
{
    std::vector<StateVec> states = {
        {0.50, 0.50},  // 0: query state
        {0.55, 0.50},  // 1: in radius
        {0.50, 0.56},  // 2: in radius, edge to 0 known invalid
        {0.90, 0.90},  // 3: out of radius, parent of 0
        {0.10, 0.10},  // 4: out of radius, child of 0
        {0.52, 0.48},  // 5: in radius
    };
    std::vector<std::size_t> ids = {0u, 1u, 2u, 3u, 4u, 5u};
    NeighborIndex index;
    index.rebuild(states, ids, 0.1);

    EdgeSet invalid;
    invalid.insert(2u, 0u);

    auto result = neighbors(0u, states, index, 3u, {4u}, invalid);
    std::sort(result.begin(), result.end());
    CHECK(result == std::vector<std::size_t>{1u, 3u, 4u, 5u});

    // No points in radius and no tree links: empty.
    NeighborIndex tight;
    tight.rebuild(states, ids, 0.01);
    CHECK(neighbors(0u, states, tight, std::nullopt, {}, invalid).empty());
}
