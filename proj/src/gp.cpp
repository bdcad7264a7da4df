#include "gitstar/gp.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <sstream>

namespace gitstar
{
    namespace
    {
        constexpr std::array<Op, 6> kBinaryOps = {Op::Add, Op::Sub, Op::Mul,
                                                  Op::PDiv, Op::Min, Op::Max};
        constexpr std::array<Op, 3> kUnaryOps = {Op::PLog1p, Op::PSqrt, Op::Abs};
        constexpr std::array<Op, 14> kTerminals = {
            Op::GHatT, Op::HHatT,    Op::CHat,    Op::EBarS,    Op::EBarEdge,
            Op::DBarT, Op::Dim,      Op::US,      Op::UT,       Op::WDyn,
            Op::NSamples, Op::ConstPi, Op::ConstOne, Op::Ephemeral};

        constexpr double kDivEpsilon = 1e-12;

        double drawEphemeral(std::mt19937_64 &rng, const GpParams &params)
        {
            std::uniform_real_distribution<double> dist(params.ephemeral_lo,
                                                        params.ephemeral_hi);
            return dist(rng);
        }

        ExprNode randomTerminal(std::mt19937_64 &rng, const GpParams &params)
        {
            std::uniform_int_distribution<std::size_t> pick(0u, kTerminals.size() - 1u);
            const Op op = kTerminals[pick(rng)];
            ExprNode node{op, 0.0};
            if (op == Op::Ephemeral)
            {
                node.value = drawEphemeral(rng, params);
            }
            return node;
        }

        Op randomFunction(std::mt19937_64 &rng)
        {
            std::uniform_int_distribution<std::size_t> pick(
                0u, kBinaryOps.size() + kUnaryOps.size() - 1u);
            const std::size_t i = pick(rng);
            return i < kBinaryOps.size() ? kBinaryOps[i] : kUnaryOps[i - kBinaryOps.size()];
        }
    }  // namespace

    int arity(Op op)
    {
        switch (op)
        {
            case Op::Add:
            case Op::Sub:
            case Op::Mul:
            case Op::PDiv:
            case Op::Min:
            case Op::Max:
                return 2;
            case Op::PLog1p:
            case Op::PSqrt:
            case Op::Abs:
                return 1;
            default:
                return 0;
        }
    }

    bool isTerminal(Op op)
    {
        return arity(op) == 0;
    }

    const char *opName(Op op)
    {
        switch (op)
        {
            case Op::Add: return "ADD";
            case Op::Sub: return "SUB";
            case Op::Mul: return "MUL";
            case Op::PDiv: return "PDIV";
            case Op::Min: return "MIN";
            case Op::Max: return "MAX";
            case Op::PLog1p: return "PLOG1P";
            case Op::PSqrt: return "PSQRT";
            case Op::Abs: return "ABS";
            case Op::GHatT: return "G_HAT_T";
            case Op::HHatT: return "H_HAT_T";
            case Op::CHat: return "C_HAT";
            case Op::EBarS: return "E_BAR_S";
            case Op::EBarEdge: return "E_BAR_EDGE";
            case Op::DBarT: return "D_BAR_T";
            case Op::Dim: return "DIM";
            case Op::US: return "U_S";
            case Op::UT: return "U_T";
            case Op::WDyn: return "W_DYN";
            case Op::NSamples: return "N_SAMPLES";
            case Op::ConstPi: return "CONST_PI";
            case Op::ConstOne: return "CONST_ONE";
            case Op::Ephemeral: return "EPHEMERAL";
        }
        return "?";
    }

    namespace
    {
        double evalAt(const std::vector<ExprNode> &nodes, std::size_t &pos,
                      const EdgeContext &ctx)
        {
            if (pos >= nodes.size())
            {
                throw ExprParseError("truncated expression tree");
            }
            const ExprNode node = nodes[pos++];
            switch (node.op)
            {
                case Op::Add:
                {
                    const double a = evalAt(nodes, pos, ctx);
                    const double b = evalAt(nodes, pos, ctx);
                    return a + b;
                }
                case Op::Sub:
                {
                    const double a = evalAt(nodes, pos, ctx);
                    const double b = evalAt(nodes, pos, ctx);
                    return a - b;
                }
                case Op::Mul:
                {
                    const double a = evalAt(nodes, pos, ctx);
                    const double b = evalAt(nodes, pos, ctx);
                    return a * b;
                }
                case Op::PDiv:
                {
                    const double a = evalAt(nodes, pos, ctx);
                    const double b = evalAt(nodes, pos, ctx);
                    return std::abs(b) > kDivEpsilon ? a / b : 1.0;
                }
                case Op::Min:
                {
                    const double a = evalAt(nodes, pos, ctx);
                    const double b = evalAt(nodes, pos, ctx);
                    return std::min(a, b);
                }
                case Op::Max:
                {
                    const double a = evalAt(nodes, pos, ctx);
                    const double b = evalAt(nodes, pos, ctx);
                    return std::max(a, b);
                }
                case Op::PLog1p: return std::log1p(std::abs(evalAt(nodes, pos, ctx)));
                case Op::PSqrt: return std::sqrt(std::abs(evalAt(nodes, pos, ctx)));
                case Op::Abs: return std::abs(evalAt(nodes, pos, ctx));
                case Op::GHatT: return ctx.g_hat_t;
                case Op::HHatT: return ctx.h_hat_t;
                case Op::CHat: return ctx.c_hat;
                case Op::EBarS: return ctx.e_bar_s;
                case Op::EBarEdge: return ctx.e_bar_edge;
                case Op::DBarT: return ctx.d_bar_t;
                case Op::Dim: return ctx.dim;
                case Op::US: return ctx.u_s;
                case Op::UT: return ctx.u_t;
                case Op::WDyn: return ctx.w_dyn;
                case Op::NSamples: return ctx.n_samples;
                case Op::ConstPi: return M_PI;
                case Op::ConstOne: return 1.0;
                case Op::Ephemeral: return node.value;
            }
            throw ExprParseError("unknown operator");
        }

        int depthAt(const std::vector<ExprNode> &nodes, std::size_t &pos)
        {
            if (pos >= nodes.size())
            {
                throw ExprParseError("truncated expression tree");
            }
            const int n_children = arity(nodes[pos++].op);
            int deepest = -1;
            for (int i = 0; i < n_children; ++i)
            {
                deepest = std::max(deepest, depthAt(nodes, pos));
            }
            return deepest + 1;
        }
    }  // namespace

    double ExprTree::eval(const EdgeContext &ctx) const
    {
        std::size_t pos = 0u;
        const double result = evalAt(nodes, pos, ctx);
        if (pos != nodes.size())
        {
            throw ExprParseError("trailing nodes after expression root");
        }
        return result;
    }

    int ExprTree::depth() const
    {
        std::size_t pos = 0u;
        return depthAt(nodes, pos);
    }

    bool ExprTree::wellFormed() const
    {
        if (nodes.empty())
        {
            return false;
        }
        std::size_t needed = 1u;
        for (std::size_t i = 0u; i < nodes.size(); ++i)
        {
            if (needed == 0u)
            {
                return false;
            }
            needed += static_cast<std::size_t>(arity(nodes[i].op));
            --needed;
        }
        return needed == 0u;
    }

    std::size_t ExprTree::subtreeEnd(std::size_t pos) const
    {
        std::size_t needed = 1u;
        std::size_t i = pos;
        while (needed > 0u && i < nodes.size())
        {
            needed += static_cast<std::size_t>(arity(nodes[i].op));
            --needed;
            ++i;
        }
        return i;
    }

    double evalExpr(const ExprTree &tree, const EdgeContext &ctx)
    {
        return tree.eval(ctx);
    }

    namespace
    {
        void growNodes(std::vector<ExprNode> &out, std::mt19937_64 &rng, int depth_left,
                       bool full, const GpParams &params)
        {
            const bool must_terminate = depth_left <= 0;
            bool choose_terminal = must_terminate;
            if (!must_terminate && !full)
            {
                // Grow trees mix terminals in at interior depths.
                std::uniform_real_distribution<double> coin(0.0, 1.0);
                choose_terminal =
                    coin(rng) < static_cast<double>(kTerminals.size()) /
                                    static_cast<double>(kTerminals.size() +
                                                        kBinaryOps.size() + kUnaryOps.size());
            }
            if (choose_terminal)
            {
                out.push_back(randomTerminal(rng, params));
                return;
            }
            const Op op = randomFunction(rng);
            out.push_back(ExprNode{op, 0.0});
            for (int i = 0; i < arity(op); ++i)
            {
                growNodes(out, rng, depth_left - 1, full, params);
            }
        }
    }  // namespace

    ExprTree randomTree(std::mt19937_64 &rng, int depth_limit, bool full,
                        const GpParams &params)
    {
        ExprTree tree;
        growNodes(tree.nodes, rng, depth_limit, full, params);
        return tree;
    }

    Population initPopulation(std::size_t size, std::mt19937_64 &rng, const GpParams &params)
    {
        if (size < 2u)
        {
            throw std::invalid_argument("population size must be at least 2");
        }
        Population population;
        population.reserve(size);
        const int min_depth = 2;
        for (std::size_t i = 0u; i < size; ++i)
        {
            const int depth = min_depth + static_cast<int>(i % static_cast<std::size_t>(
                                                                   params.max_depth -
                                                                   min_depth + 1));
            const bool full = (i / static_cast<std::size_t>(params.max_depth - min_depth +
                                                            1)) % 2u == 0u;
            ExprIndividual ind;
            ind.primary = randomTree(rng, depth, full, params);
            ind.tiebreak = randomTree(rng, depth, full, params);
            population.push_back(std::move(ind));
        }
        return population;
    }

    std::size_t tournamentSelect(const Population &population, std::size_t k,
                                 std::mt19937_64 &rng)
    {
        std::uniform_int_distribution<std::size_t> pick(0u, population.size() - 1u);
        std::size_t best = population.size();
        for (std::size_t draw = 0u; draw < k; ++draw)
        {
            const std::size_t i = pick(rng);
            const auto &candidate = population[i];
            if (!candidate.fitness.has_value())
            {
                throw std::invalid_argument("tournamentSelect: unevaluated individual");
            }
            if (best == population.size())
            {
                best = i;
                continue;
            }
            const auto &incumbent = population[best];
            if (*candidate.fitness < *incumbent.fitness ||
                (*candidate.fitness == *incumbent.fitness &&
                 candidate.size() < incumbent.size()))
            {
                best = i;
            }
        }
        return best;
    }

    namespace
    {
        // Node index pairs at matching structural positions of both trees:
        // the root pair, then children wherever the arities agree.
        void collectCommonRegion(const ExprTree &a, const ExprTree &b, std::size_t pa,
                                 std::size_t pb,
                                 std::vector<std::pair<std::size_t, std::size_t>> &out)
        {
            out.emplace_back(pa, pb);
            const int n = arity(a.nodes[pa].op);
            if (n == 0 || n != arity(b.nodes[pb].op))
            {
                return;
            }
            std::size_t ca = pa + 1u;
            std::size_t cb = pb + 1u;
            for (int i = 0; i < n; ++i)
            {
                collectCommonRegion(a, b, ca, cb, out);
                ca = a.subtreeEnd(ca);
                cb = b.subtreeEnd(cb);
            }
        }

        // Swaps the subtrees at one uniformly chosen common-region point.
        // Depth-valid parents cannot produce a depth violation this way; the
        // retry loop guards ill-formed inputs.
        ExprTree crossComponent(const ExprTree &base, const ExprTree &donor,
                                std::mt19937_64 &rng, int max_depth)
        {
            std::vector<std::pair<std::size_t, std::size_t>> region;
            collectCommonRegion(base, donor, 0u, 0u, region);
            std::uniform_int_distribution<std::size_t> pick(0u, region.size() - 1u);
            for (int attempt = 0; attempt < 10; ++attempt)
            {
                const auto [b, d] = region[pick(rng)];
                ExprTree child;
                child.nodes.reserve(base.nodes.size() + donor.nodes.size());
                child.nodes.insert(child.nodes.end(), base.nodes.begin(),
                                   base.nodes.begin() +
                                       static_cast<std::ptrdiff_t>(b));
                child.nodes.insert(child.nodes.end(),
                                   donor.nodes.begin() + static_cast<std::ptrdiff_t>(d),
                                   donor.nodes.begin() +
                                       static_cast<std::ptrdiff_t>(donor.subtreeEnd(d)));
                child.nodes.insert(child.nodes.end(),
                                   base.nodes.begin() +
                                       static_cast<std::ptrdiff_t>(base.subtreeEnd(b)),
                                   base.nodes.end());
                if (child.depth() <= max_depth)
                {
                    return child;
                }
            }
            return base;
        }
    }  // namespace

    ExprIndividual subtreeCrossover(const ExprIndividual &p1, const ExprIndividual &p2,
                                    double rate, std::mt19937_64 &rng, const GpParams &params)
    {
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        ExprIndividual child;
        child.primary = coin(rng) < rate
                            ? crossComponent(p1.primary, p2.primary, rng, params.max_depth)
                            : p1.primary;
        child.tiebreak = coin(rng) < rate
                             ? crossComponent(p1.tiebreak, p2.tiebreak, rng, params.max_depth)
                             : p1.tiebreak;
        return child;
    }

    namespace
    {
        void mutateNodes(std::vector<ExprNode> &nodes, double rate, std::mt19937_64 &rng,
                         const GpParams &params)
        {
            std::uniform_real_distribution<double> coin(0.0, 1.0);
            for (auto &node : nodes)
            {
                if (coin(rng) >= rate)
                {
                    continue;
                }
                const int a = arity(node.op);
                if (a == 0)
                {
                    node = randomTerminal(rng, params);
                }
                else if (a == 1)
                {
                    std::uniform_int_distribution<std::size_t> pick(0u,
                                                                    kUnaryOps.size() - 1u);
                    node.op = kUnaryOps[pick(rng)];
                }
                else
                {
                    std::uniform_int_distribution<std::size_t> pick(0u,
                                                                    kBinaryOps.size() - 1u);
                    node.op = kBinaryOps[pick(rng)];
                }
            }
        }
    }  // namespace

    ExprIndividual pointMutate(const ExprIndividual &ind, double rate, std::mt19937_64 &rng,
                               const GpParams &params)
    {
        ExprIndividual result;
        result.primary = ind.primary;
        result.tiebreak = ind.tiebreak;
        mutateNodes(result.primary.nodes, rate, rng, params);
        mutateNodes(result.tiebreak.nodes, rate, rng, params);
        return result;
    }

    namespace
    {
        void appendSExpr(const std::vector<ExprNode> &nodes, std::size_t &pos,
                         std::ostringstream &out)
        {
            const ExprNode &node = nodes[pos++];
            if (node.op == Op::Ephemeral)
            {
                out << node.value;
                return;
            }
            if (isTerminal(node.op))
            {
                out << opName(node.op);
                return;
            }
            out << '(' << opName(node.op);
            for (int i = 0; i < arity(node.op); ++i)
            {
                out << ' ';
                appendSExpr(nodes, pos, out);
            }
            out << ')';
        }

        std::vector<std::string> tokenize(const std::string &text)
        {
            std::vector<std::string> tokens;
            std::string current;
            for (const char c : text)
            {
                if (c == '(' || c == ')')
                {
                    if (!current.empty())
                    {
                        tokens.push_back(current);
                        current.clear();
                    }
                    tokens.push_back(std::string(1u, c));
                }
                else if (std::isspace(static_cast<unsigned char>(c)))
                {
                    if (!current.empty())
                    {
                        tokens.push_back(current);
                        current.clear();
                    }
                }
                else
                {
                    current.push_back(c);
                }
            }
            if (!current.empty())
            {
                tokens.push_back(current);
            }
            return tokens;
        }

        std::optional<Op> opFromName(const std::string &name)
        {
            static const std::array<Op, 22> named = {
                Op::Add,    Op::Sub,      Op::Mul,      Op::PDiv,  Op::Min,
                Op::Max,    Op::PLog1p,   Op::PSqrt,    Op::Abs,   Op::GHatT,
                Op::HHatT,  Op::CHat,     Op::EBarS,    Op::EBarEdge, Op::DBarT,
                Op::Dim,    Op::US,       Op::UT,       Op::WDyn,  Op::NSamples,
                Op::ConstPi, Op::ConstOne};
            for (const Op op : named)
            {
                if (name == opName(op))
                {
                    return op;
                }
            }
            return std::nullopt;
        }

        void parseSExpr(const std::vector<std::string> &tokens, std::size_t &pos,
                        std::vector<ExprNode> &out)
        {
            if (pos >= tokens.size())
            {
                throw ExprParseError("unexpected end of expression");
            }
            const std::string token = tokens[pos++];
            if (token == "(")
            {
                if (pos >= tokens.size())
                {
                    throw ExprParseError("dangling '('");
                }
                const std::string name = tokens[pos++];
                const auto op = opFromName(name);
                if (!op.has_value() || isTerminal(*op))
                {
                    throw ExprParseError("expected function name, got '" + name + "'");
                }
                out.push_back(ExprNode{*op, 0.0});
                for (int i = 0; i < arity(*op); ++i)
                {
                    parseSExpr(tokens, pos, out);
                }
                if (pos >= tokens.size() || tokens[pos] != ")")
                {
                    throw ExprParseError("expected ')' after " + name);
                }
                ++pos;
                return;
            }
            if (token == ")")
            {
                throw ExprParseError("unexpected ')'");
            }
            const auto op = opFromName(token);
            if (op.has_value())
            {
                if (!isTerminal(*op))
                {
                    throw ExprParseError("function '" + token + "' needs arguments");
                }
                out.push_back(ExprNode{*op, 0.0});
                return;
            }
            double value = 0.0;
            std::size_t consumed = 0u;
            try
            {
                value = std::stod(token, &consumed);
            }
            catch (const std::invalid_argument &)
            {
                throw ExprParseError("unknown token '" + token + "'");
            }
            catch (const std::out_of_range &)
            {
                throw ExprParseError("numeric literal out of range: '" + token + "'");
            }
            if (consumed != token.size())
            {
                throw ExprParseError("bad numeric literal '" + token + "'");
            }
            out.push_back(ExprNode{Op::Ephemeral, value});
        }
    }  // namespace

    std::string ExprTree::toSExpr() const
    {
        std::ostringstream out;
        out.precision(17);
        std::size_t pos = 0u;
        appendSExpr(nodes, pos, out);
        return out.str();
    }

    ExprTree ExprTree::fromSExpr(const std::string &text)
    {
        const auto tokens = tokenize(text);
        ExprTree tree;
        std::size_t pos = 0u;
        parseSExpr(tokens, pos, tree.nodes);
        if (pos != tokens.size())
        {
            throw ExprParseError("trailing tokens after expression");
        }
        return tree;
    }

    ExprIndividual winnerHeuristic()
    {
        ExprIndividual ind;
        ind.primary = ExprTree::fromSExpr(
            "(MUL (SUB G_HAT_T CONST_PI) (PDIV (PLOG1P (SUB U_T U_S)) (ADD CONST_ONE "
            "W_DYN)))");
        ind.tiebreak = ExprTree::fromSExpr(
            "(MUL (PSQRT (ADD E_BAR_S E_BAR_EDGE)) (PLOG1P (SUB (MAX D_BAR_T CONST_ONE) "
            "CONST_ONE)))");
        return ind;
    }

    ExprIndividual baselineHeuristic()
    {
        ExprIndividual ind;
        ind.primary = ExprTree::fromSExpr("(ADD (ADD G_HAT_T C_HAT) H_HAT_T)");
        ind.tiebreak = ExprTree::fromSExpr("(ADD E_BAR_S E_BAR_EDGE)");
        return ind;
    }

    std::string individualToText(const ExprIndividual &ind)
    {
        return ind.primary.toSExpr() + "\n" + ind.tiebreak.toSExpr() + "\n";
    }

    ExprIndividual individualFromText(const std::string &text)
    {
        std::istringstream in(text);
        std::vector<std::string> lines;
        std::string line;
        while (std::getline(in, line))
        {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
            {
                lines.push_back(line);
            }
        }
        if (lines.size() != 2u)
        {
            throw ExprParseError("heuristic text must hold exactly two expressions");
        }
        ExprIndividual ind;
        ind.primary = ExprTree::fromSExpr(lines[0]);
        ind.tiebreak = ExprTree::fromSExpr(lines[1]);
        return ind;
    }
}  // namespace gitstar
