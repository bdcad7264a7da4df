#ifndef GITSTAR_GP_HPP
#define GITSTAR_GP_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace gitstar
{
    /// Terminal values bound for one (x_s, x_t) edge query. Integer-valued
    /// signals are widened to doubles.
    struct EdgeContext
    {
        double g_hat_t = 0.0;
        double h_hat_t = 0.0;
        double c_hat = 0.0;
        double e_bar_s = 0.0;
        double e_bar_edge = 0.0;
        double d_bar_t = 0.0;
        double dim = 0.0;
        double u_s = 0.0;
        double u_t = 0.0;
        double w_dyn = 0.0;
        double n_samples = 0.0;
    };

    enum class Op : std::uint8_t
    {
        // binary
        Add,
        Sub,
        Mul,
        PDiv,
        Min,
        Max,
        // unary
        PLog1p,
        PSqrt,
        Abs,
        // terminals
        GHatT,
        HHatT,
        CHat,
        EBarS,
        EBarEdge,
        DBarT,
        Dim,
        US,
        UT,
        WDyn,
        NSamples,
        ConstPi,
        ConstOne,
        Ephemeral
    };

    int arity(Op op);
    bool isTerminal(Op op);
    const char *opName(Op op);

    struct ExprNode
    {
        Op op;
        double value = 0.0;  // ephemeral constant payload

        bool operator==(const ExprNode &other) const
        {
            return op == other.op && value == other.value;
        }
    };

    class ExprParseError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Expression tree stored in prefix order. Protected operators keep
    /// evaluation total over finite contexts.
    struct ExprTree
    {
        std::vector<ExprNode> nodes;

        double eval(const EdgeContext &ctx) const;
        int depth() const;
        bool wellFormed() const;

        /// One-past-the-end index of the subtree rooted at pos.
        std::size_t subtreeEnd(std::size_t pos) const;

        std::string toSExpr() const;
        static ExprTree fromSExpr(const std::string &text);

        bool operator==(const ExprTree &other) const { return nodes == other.nodes; }
    };

    double evalExpr(const ExprTree &tree, const EdgeContext &ctx);

    /// A candidate G-heuristic: lexicographic (primary, tiebreak) key pair.
    struct ExprIndividual
    {
        ExprTree primary;
        ExprTree tiebreak;
        std::optional<double> fitness;

        std::size_t size() const { return primary.nodes.size() + tiebreak.nodes.size(); }
        std::pair<double, double> evalKey(const EdgeContext &ctx) const
        {
            return {primary.eval(ctx), tiebreak.eval(ctx)};
        }
    };

    struct GpParams
    {
        std::size_t population_size = 1500u;
        std::size_t generations = 100u;
        double crossover_rate = 0.8;
        double mutation_rate = 0.1;
        std::size_t tournament_size = 5u;
        int max_depth = 4;
        double ephemeral_lo = 0.0;
        double ephemeral_hi = 10.0;
    };

    using Population = std::vector<ExprIndividual>;

    ExprTree randomTree(std::mt19937_64 &rng, int depth_limit, bool full,
                        const GpParams &params = {});

    /// Ramped half-and-half over depths 2..max_depth; duplicates permitted.
    Population initPopulation(std::size_t size, std::mt19937_64 &rng,
                              const GpParams &params = {});

    /// Index of the tournament winner; all fitnesses must be assigned.
    /// Lower fitness wins; ties prefer smaller individuals, then draw order.
    std::size_t tournamentSelect(const Population &population, std::size_t k,
                                 std::mt19937_64 &rng);

    /// One-child subtree crossover applied component-wise; offspring trees
    /// never exceed the depth cap.
    ExprIndividual subtreeCrossover(const ExprIndividual &p1, const ExprIndividual &p2,
                                    double rate, std::mt19937_64 &rng,
                                    const GpParams &params = {});

    /// Same-arity point mutation with per-node probability.
    ExprIndividual pointMutate(const ExprIndividual &ind, double rate, std::mt19937_64 &rng,
                               const GpParams &params = {});

    /// The evolved winner key pair, encoded exactly in the primitive set.
    ExprIndividual winnerHeuristic();

    /// The linear distance+effort control key pair.
    ExprIndividual baselineHeuristic();

    /// Two S-expression lines: primary then tiebreak.
    std::string individualToText(const ExprIndividual &ind);
    ExprIndividual individualFromText(const std::string &text);
}  // namespace gitstar

#endif
