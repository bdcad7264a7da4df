#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "gitstar/gp.hpp"

using namespace gitstar;

namespace
{
    EdgeContext randomContext(std::mt19937_64 &rng)
    {
        std::uniform_real_distribution<double> small(0.0, 2.0);
        std::uniform_real_distribution<double> wide(-1e6, 1e6);
        EdgeContext ctx;
        ctx.g_hat_t = small(rng);
        ctx.h_hat_t = small(rng);
        ctx.c_hat = small(rng);
        ctx.e_bar_s = std::abs(wide(rng));
        ctx.e_bar_edge = std::abs(wide(rng));
        ctx.d_bar_t = std::abs(wide(rng));
        ctx.dim = 8.0;
        ctx.u_s = wide(rng);
        ctx.u_t = wide(rng);
        ctx.w_dyn = std::floor(std::abs(small(rng)) * 10.0);
        ctx.n_samples = 1e4;
        return ctx;
    }

    bool sameShape(const ExprTree &a, const ExprTree &b)
    {
        if (a.nodes.size() != b.nodes.size())
        {
            return false;
        }
        for (std::size_t i = 0u; i < a.nodes.size(); ++i)
        {
            if (arity(a.nodes[i].op) != arity(b.nodes[i].op))
            {
                return false;
            }
        }
        return true;
    }
}

TEST_CASE("eval: constants and protection rules")
{
    EdgeContext ctx;
    CHECK(ExprTree::fromSExpr("CONST_PI").eval(ctx) == doctest::Approx(M_PI));
    CHECK(ExprTree::fromSExpr("CONST_ONE").eval(ctx) == 1.0);
    CHECK(ExprTree::fromSExpr("3.75").eval(ctx) == doctest::Approx(3.75));

    ctx.g_hat_t = 7.0;
    CHECK(ExprTree::fromSExpr("(PDIV G_HAT_T H_HAT_T)").eval(ctx) == 1.0);  // divide by 0
    ctx.h_hat_t = 2.0;
    CHECK(ExprTree::fromSExpr("(PDIV G_HAT_T H_HAT_T)").eval(ctx) == doctest::Approx(3.5));
    ctx.u_s = -4.0;
    CHECK(ExprTree::fromSExpr("(PSQRT U_S)").eval(ctx) == doctest::Approx(2.0));
    CHECK(ExprTree::fromSExpr("(PLOG1P U_S)").eval(ctx) == doctest::Approx(std::log(5.0)));
    CHECK(ExprTree::fromSExpr("(ABS U_S)").eval(ctx) == doctest::Approx(4.0));
    CHECK(ExprTree::fromSExpr("(MIN U_S H_HAT_T)").eval(ctx) == doctest::Approx(-4.0));
    CHECK(ExprTree::fromSExpr("(MAX U_S H_HAT_T)").eval(ctx) == doctest::Approx(2.0));
}

TEST_CASE("eval: hand-built first key component on the worked context")
{
    // g_hat = 5, |U_t - U_s| = e - 1, w_dyn = 0 gives (5 - pi) * 1 / 1.
    EdgeContext ctx;
    ctx.g_hat_t = 5.0;
    ctx.u_t = M_E - 1.0;
    ctx.u_s = 0.0;
    ctx.w_dyn = 0.0;
    const auto tree = ExprTree::fromSExpr(
        "(MUL (SUB G_HAT_T CONST_PI) (PDIV (PLOG1P (SUB U_T U_S)) (ADD CONST_ONE "
        "W_DYN)))");
    CHECK(tree.depth() == 4);
    CHECK(tree.eval(ctx) == doctest::Approx(5.0 - M_PI).epsilon(1e-12));
    CHECK(tree.eval(ctx) == doctest::Approx(1.8584).epsilon(1e-4));

    // The shipped winner individual encodes the same expression.
    CHECK(winnerHeuristic().primary.eval(ctx) == doctest::Approx(5.0 - M_PI).epsilon(1e-12));
}

TEST_CASE("eval: winner tiebreak component")
{
    EdgeContext ctx;
    ctx.e_bar_s = 4.0;
    ctx.e_bar_edge = 5.0;
    ctx.d_bar_t = M_E;
    CHECK(winnerHeuristic().tiebreak.eval(ctx) == doctest::Approx(3.0).epsilon(1e-12));
    // log(max(d_bar, 1)) clamps below one.
    ctx.d_bar_t = 0.25;
    CHECK(winnerHeuristic().tiebreak.eval(ctx) == doctest::Approx(0.0));
}

TEST_CASE("eval: closure over random trees and contexts")
{
    std::mt19937_64 rng(31u);
    GpParams params;
    for (int trial = 0; trial < 20000; ++trial)
    {
        const ExprTree tree = randomTree(rng, 4, trial % 2 == 0, params);
        REQUIRE(tree.wellFormed());
        const EdgeContext ctx = randomContext(rng);
        const double value = tree.eval(ctx);
        CHECK(std::isfinite(value));
    }
}

TEST_CASE("init population: size, depth cap, determinism, ramped depths")
{
    GpParams params;
    std::mt19937_64 rng_a(5u), rng_b(5u);
    const auto pop_a = initPopulation(60u, rng_a, params);
    const auto pop_b = initPopulation(60u, rng_b, params);
    REQUIRE(pop_a.size() == 60u);

    std::set<int> depths;
    for (std::size_t i = 0u; i < pop_a.size(); ++i)
    {
        CHECK(pop_a[i].primary.depth() <= 4);
        CHECK(pop_a[i].tiebreak.depth() <= 4);
        CHECK(pop_a[i].primary == pop_b[i].primary);
        CHECK(pop_a[i].tiebreak == pop_b[i].tiebreak);
        depths.insert(pop_a[i].primary.depth());
    }
    // Ramped half-and-half reaches every depth from 2 to the cap.
    CHECK(depths.count(2) == 1u);
    CHECK(depths.count(3) == 1u);
    CHECK(depths.count(4) == 1u);

    std::mt19937_64 rng_c(6u);
    CHECK_THROWS_AS(initPopulation(1u, rng_c, params), std::invalid_argument);
}

TEST_CASE("tournament: unique minimum always wins at full tournament size")
{
    std::mt19937_64 rng(9u);
    GpParams params;
    auto population = initPopulation(10u, rng, params);
    for (std::size_t i = 0u; i < population.size(); ++i)
    {
        population[i].fitness = 100.0 + static_cast<double>(i);
    }
    population[7].fitness = 1.0;
    for (int trial = 0; trial < 20; ++trial)
    {
        CHECK(tournamentSelect(population, population.size() * 4u, rng) == 7u);
    }
}

TEST_CASE("tournament: ties break by size then draw order")
{
    std::mt19937_64 rng(3u);
    GpParams params;
    auto population = initPopulation(8u, rng, params);
    for (auto &ind : population)
    {
        ind.fitness = 5.0;
    }
    // A strictly smaller individual wins fitness ties.
    ExprIndividual tiny;
    tiny.primary = ExprTree::fromSExpr("CONST_ONE");
    tiny.tiebreak = ExprTree::fromSExpr("CONST_ONE");
    tiny.fitness = 5.0;
    population.push_back(tiny);
    CHECK(tournamentSelect(population, population.size() * 4u, rng) ==
          population.size() - 1u);

    // All equal fitness and equal size: the first draw stands.
    Population equal;
    for (int i = 0; i < 6; ++i)
    {
        ExprIndividual ind;
        ind.primary = ExprTree::fromSExpr("G_HAT_T");
        ind.tiebreak = ExprTree::fromSExpr("H_HAT_T");
        ind.fitness = 1.0;
        equal.push_back(ind);
    }
    std::mt19937_64 rng_pick(77u), rng_expected(77u);
    const auto winner = tournamentSelect(equal, 4u, rng_pick);
    std::uniform_int_distribution<std::size_t> first_draw(0u, equal.size() - 1u);
    CHECK(winner == first_draw(rng_expected));

    Population unevaluated = equal;
    unevaluated[2].fitness.reset();
    std::mt19937_64 rng2(1u);
    CHECK_THROWS_AS(tournamentSelect(unevaluated, 20u, rng2), std::invalid_argument);
}

TEST_CASE("tournament: seeded winner sequence is reproducible")
{
    std::mt19937_64 init_rng(12u);
    GpParams params;
    auto population = initPopulation(30u, init_rng, params);
    std::mt19937_64 fit_rng(13u);
    std::uniform_real_distribution<double> fit(0.0, 100.0);
    for (auto &ind : population)
    {
        ind.fitness = fit(fit_rng);
    }
    std::mt19937_64 rng_a(21u), rng_b(21u);
    for (int i = 0; i < 50; ++i)
    {
        CHECK(tournamentSelect(population, 5u, rng_a) ==
              tournamentSelect(population, 5u, rng_b));
    }
}

TEST_CASE("crossover: zero rate copies the first parent")
{
    std::mt19937_64 rng(41u);
    GpParams params;
    const auto pop = initPopulation(4u, rng, params);
    const auto child = subtreeCrossover(pop[0], pop[1], 0.0, rng, params);
    CHECK(child.primary == pop[0].primary);
    CHECK(child.tiebreak == pop[0].tiebreak);
}

TEST_CASE("crossover: identical parents reproduce themselves")
{
    std::mt19937_64 rng(42u);
    GpParams params;
    for (int trial = 0; trial < 200; ++trial)
    {
        ExprIndividual parent;
        parent.primary = randomTree(rng, 4, trial % 2 == 0, params);
        parent.tiebreak = randomTree(rng, 3, trial % 2 == 1, params);
        const auto child = subtreeCrossover(parent, parent, 1.0, rng, params);
        CHECK(child.primary == parent.primary);
        CHECK(child.tiebreak == parent.tiebreak);
    }
}

TEST_CASE("crossover: depth cap holds over many applications")
{
    std::mt19937_64 rng(43u);
    GpParams params;
    auto pop = initPopulation(40u, rng, params);
    for (int trial = 0; trial < 10000; ++trial)
    {
        std::uniform_int_distribution<std::size_t> pick(0u, pop.size() - 1u);
        const auto child =
            subtreeCrossover(pop[pick(rng)], pop[pick(rng)], 0.9, rng, params);
        CHECK(child.primary.depth() <= 4);
        CHECK(child.tiebreak.depth() <= 4);
        CHECK(child.primary.wellFormed());
        CHECK(child.tiebreak.wellFormed());
        pop[pick(rng)] = child;  // keep mixing
    }
}

TEST_CASE("mutation: zero rate is the identity")
{
    std::mt19937_64 rng(51u);
    GpParams params;
    const auto pop = initPopulation(4u, rng, params);
    const auto mutant = pointMutate(pop[2], 0.0, rng, params);
    CHECK(mutant.primary == pop[2].primary);
    CHECK(mutant.tiebreak == pop[2].tiebreak);
}

TEST_CASE("mutation: rate one preserves arity everywhere")
{
    const auto tree = ExprTree::fromSExpr("(ADD (ADD G_HAT_T H_HAT_T) (ADD C_HAT U_S))");
    ExprIndividual ind;
    ind.primary = tree;
    ind.tiebreak = tree;
    std::mt19937_64 rng(52u);
    const auto mutant = pointMutate(ind, 1.0, rng, GpParams{});
    for (const auto &component : {mutant.primary, mutant.tiebreak})
    {
        REQUIRE(component.nodes.size() == tree.nodes.size());
        for (std::size_t i = 0u; i < component.nodes.size(); ++i)
        {
            CHECK(arity(component.nodes[i].op) == arity(tree.nodes[i].op));
        }
    }
}

TEST_CASE("mutation: tree shape invariant for random trees")
{
    std::mt19937_64 rng(53u);
    GpParams params;
    for (int trial = 0; trial < 500; ++trial)
    {
        ExprIndividual ind;
        ind.primary = randomTree(rng, 4, trial % 2 == 0, params);
        ind.tiebreak = randomTree(rng, 4, trial % 2 == 1, params);
        const auto mutant = pointMutate(ind, 0.3, rng, params);
        CHECK(sameShape(mutant.primary, ind.primary));
        CHECK(sameShape(mutant.tiebreak, ind.tiebreak));
        CHECK(mutant.primary.depth() == ind.primary.depth());
    }
}

TEST_CASE("serialization: round trip preserves structure and values")
{
    std::mt19937_64 rng(61u);
    GpParams params;
    for (int trial = 0; trial < 500; ++trial)
    {
        const ExprTree tree = randomTree(rng, 4, trial % 2 == 0, params);
        const ExprTree restored = ExprTree::fromSExpr(tree.toSExpr());
        CHECK(restored == tree);
    }

    ExprIndividual ind = winnerHeuristic();
    const auto restored = individualFromText(individualToText(ind));
    CHECK(restored.primary == ind.primary);
    CHECK(restored.tiebreak == ind.tiebreak);
}

TEST_CASE("serialization: malformed inputs are rejected")
{
    CHECK_THROWS_AS(ExprTree::fromSExpr("(ADD G_HAT_T"), ExprParseError);
    CHECK_THROWS_AS(ExprTree::fromSExpr("(BOGUS 1 2)"), ExprParseError);
    CHECK_THROWS_AS(ExprTree::fromSExpr("(ADD 1 2) extra"), ExprParseError);
    CHECK_THROWS_AS(ExprTree::fromSExpr("ADD"), ExprParseError);
    CHECK_THROWS_AS(individualFromText("(ADD CONST_ONE CONST_ONE)\n"), ExprParseError);
}
