#include "gitstar/planner.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace gitstar
{
    std::pair<double, double> gitKey(const EdgeContext &ctx)
    {
        const double first = (ctx.g_hat_t - M_PI) *
                             std::log1p(std::abs(ctx.u_t - ctx.u_s)) / (1.0 + ctx.w_dyn);
        const double second = std::sqrt(ctx.e_bar_s + ctx.e_bar_edge) *
                              std::log(std::max(ctx.d_bar_t, 1.0));
        return {first, second};
    }

    std::pair<double, double> baselineKey(const EdgeContext &ctx)
    {
        return {ctx.g_hat_t + ctx.c_hat + ctx.h_hat_t, ctx.e_bar_s + ctx.e_bar_edge};
    }

    double inflationFactor(int dimension, std::uint64_t n_samples)
    {
        if (dimension < 1 || n_samples < 1u)
        {
            throw std::invalid_argument("inflationFactor requires D >= 1 and N >= 1");
        }
        const double d = static_cast<double>(dimension);
        const double n = static_cast<double>(n_samples);
        return 1.0 + (std::log(d) + std::sqrt(d)) / (std::sqrt(n) + std::log(n) + 1.0);
    }

    double truncationFactor(std::uint64_t n_samples)
    {
        if (n_samples < 1u)
        {
            throw std::invalid_argument("truncationFactor requires N >= 1");
        }
        return 1.0 + 3.0 * M_PI / static_cast<double>(n_samples);
    }

    // --- SearchTree -------------------------------------------------------

    void SearchTree::reset(std::size_t n_states, std::size_t root)
    {
        parent_.assign(n_states, kNone);
        children_.assign(n_states, {});
        g_.assign(n_states, std::numeric_limits<double>::infinity());
        effort_.assign(n_states, std::numeric_limits<double>::infinity());
        root_ = root;
        g_[root] = 0.0;
        effort_[root] = 0.0;
        count_ = 1u;
    }

    void SearchTree::ensureSize(std::size_t n_states)
    {
        if (parent_.size() < n_states)
        {
            parent_.resize(n_states, kNone);
            children_.resize(n_states);
            g_.resize(n_states, std::numeric_limits<double>::infinity());
            effort_.resize(n_states, std::numeric_limits<double>::infinity());
        }
    }

    bool SearchTree::contains(std::size_t v) const
    {
        return v == root_ || (v < parent_.size() && parent_[v] != kNone);
    }

    void SearchTree::setEdge(std::size_t child, std::size_t new_parent, double g,
                             double effort)
    {
        if (child == root_)
        {
            throw std::logic_error("cannot reparent the tree root");
        }
        const std::size_t old_parent = parent_[child];
        if (old_parent != kNone)
        {
            auto &siblings = children_[old_parent];
            siblings.erase(std::find(siblings.begin(), siblings.end(), child));
        }
        else
        {
            ++count_;
        }
        parent_[child] = new_parent;
        children_[new_parent].push_back(child);
        g_[child] = g;
        effort_[child] = effort;
    }

    void SearchTree::removeSubtree(std::size_t v)
    {
        if (!contains(v) || v == root_)
        {
            return;
        }
        auto &siblings = children_[parent_[v]];
        siblings.erase(std::find(siblings.begin(), siblings.end(), v));

        std::vector<std::size_t> stack{v};
        while (!stack.empty())
        {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (const std::size_t c : children_[u])
            {
                stack.push_back(c);
            }
            children_[u].clear();
            parent_[u] = kNone;
            g_[u] = std::numeric_limits<double>::infinity();
            effort_[u] = std::numeric_limits<double>::infinity();
            --count_;
        }
    }

    void SearchTree::recomputeLabels(
        const std::function<double(std::size_t, std::size_t)> &edge_cost,
        const std::function<double(std::size_t, std::size_t)> &edge_effort)
    {
        std::vector<std::size_t> stack{root_};
        while (!stack.empty())
        {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (const std::size_t c : children_[u])
            {
                g_[c] = g_[u] + edge_cost(u, c);
                effort_[c] = effort_[u] + edge_effort(u, c);
                stack.push_back(c);
            }
        }
    }

    std::vector<std::size_t> SearchTree::vertices() const
    {
        std::vector<std::size_t> out;
        out.reserve(count_);
        std::vector<std::size_t> stack{root_};
        while (!stack.empty())
        {
            const std::size_t u = stack.back();
            stack.pop_back();
            out.push_back(u);
            for (const std::size_t c : children_[u])
            {
                stack.push_back(c);
            }
        }
        return out;
    }

    void SearchTree::checkInvariants(
        const std::function<double(std::size_t, std::size_t)> &edge_cost) const
    {
        if (root_ == kNone)
        {
            throw std::logic_error("tree has no root");
        }
        if (g_[root_] != 0.0)
        {
            throw std::logic_error("root label must be zero");
        }
        std::size_t visited = 0u;
        std::vector<std::size_t> stack{root_};
        while (!stack.empty())
        {
            const std::size_t u = stack.back();
            stack.pop_back();
            if (++visited > count_)
            {
                throw std::logic_error("cycle detected (visited more vertices than size)");
            }
            for (const std::size_t c : children_[u])
            {
                if (parent_[c] != u)
                {
                    throw std::logic_error("parent/children maps disagree");
                }
                if (std::abs(g_[c] - (g_[u] + edge_cost(u, c))) > 1e-9)
                {
                    throw std::logic_error("cost label inconsistent with parent");
                }
                stack.push_back(c);
            }
        }
        if (visited != count_)
        {
            throw std::logic_error("vertex count inconsistent with reachable set");
        }
    }

    // --- GitStarPlanner ---------------------------------------------------

    namespace
    {
        struct QueueEntry
        {
            double key1;
            double key2;
            std::uint64_t seq;
            std::size_t from;
            std::size_t to;
            double c_hat;

            bool operator>(const QueueEntry &o) const
            {
                if (key1 != o.key1)
                {
                    return key1 > o.key1;
                }
                if (key2 != o.key2)
                {
                    return key2 > o.key2;
                }
                return seq > o.seq;
            }
        };

        using EdgeQueue =
            std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>>;

        // Truncation bound that reduces to eps * reference for positive
        // references and stays monotone for negative evolved keys.
        double truncationBound(double reference, double eps)
        {
            return reference + (eps - 1.0) * std::abs(reference);
        }

        constexpr double kCostEps = 1e-12;
    }  // namespace

    GitStarPlanner::GitStarPlanner(const ProblemInstance &problem, PlannerConfig config,
                                   std::uint64_t seed)
      : problem_(problem)
      , config_(std::move(config))
      , rng_(seed)
      , resolution_(config_.edge_resolution > 0.0 ? config_.edge_resolution
                                                  : defaultEdgeResolution(problem.dimension))
      , c_min_(distance(problem.start, problem.goalCenter()))
    {
        if (config_.key_mode == KeyMode::EvolvedFile && !config_.evolved.has_value())
        {
            throw std::invalid_argument("EvolvedFile key mode requires an individual");
        }
        store_.batch_size = config_.batch_size;
        store_.draw_cap_per_batch = config_.draw_cap;

        registerState(problem_.start);
        registerState(problem_.goalCenter());
        forward_tree_.reset(states_.size(), kStartId);
        reverse_tree_.reset(states_.size(), kGoalId);
        start_time_ = std::chrono::steady_clock::now();
    }

    std::size_t GitStarPlanner::registerState(const StateVec &x)
    {
        const std::size_t id = states_.size();
        states_.push_back(x);
        active_.push_back(true);
        g_hat_.push_back(gHat(problem_, x));
        h_hat_.push_back(hHat(problem_, x));
        d_bar_.push_back(
            static_cast<double>(remainingEffort(problem_, x, resolution_)));
        potential_.push_back(0.0);
        potential_stamp_.push_back(0u);
        nbr_cache_.emplace_back();
        nbr_stamp_.push_back(0u);
        return id;
    }

    double GitStarPlanner::elapsedSeconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time_)
            .count();
    }

    double GitStarPlanner::progressStamp() const
    {
        return config_.batch_budget.has_value() ? static_cast<double>(state_checks_)
                                                : elapsedSeconds();
    }

    bool GitStarPlanner::budgetExpired() const
    {
        if (config_.batch_budget.has_value())
        {
            return batch_number_ >= *config_.batch_budget;
        }
        return elapsedSeconds() >= config_.time_limit_s;
    }

    bool GitStarPlanner::wallClockExpired() const
    {
        return !config_.batch_budget.has_value() &&
               elapsedSeconds() >= config_.time_limit_s;
    }

    std::size_t GitStarPlanner::addBatch()
    {
        const std::size_t before = store_.valid_samples.size();
        try
        {
            sampleBatch(problem_, store_, rng_, incumbent_cost_, &state_checks_);
        }
        catch (const SamplingExhausted &)
        {
            exhausted_ = true;
        }
        std::size_t accepted = 0u;
        for (std::size_t i = before; i < store_.valid_samples.size(); ++i)
        {
            registerState(store_.valid_samples[i]);
            ++active_samples_;
            ++accepted;
        }
        ++batch_number_;
        rebuildApproximation();
        return accepted;
    }

    void GitStarPlanner::rebuildApproximation()
    {
        const std::size_t q = active_samples_ + 2u;
        radius_ = config_.rewire_factor *
                  rggRadius(q, problem_.dimension, informed_measure_, config_.rgg_eta);

        std::vector<std::size_t> active_ids;
        active_ids.reserve(states_.size());
        for (std::size_t id = 0u; id < states_.size(); ++id)
        {
            if (active_[id])
            {
                active_ids.push_back(id);
            }
        }
        index_.rebuild(states_, active_ids, radius_);

        forward_tree_.ensureSize(states_.size());
        reverse_tree_.ensureSize(states_.size());

        if (config_.use_adaptive_factors && store_.total_drawn > 0u)
        {
            eps_infl_ = inflationFactor(problem_.dimension, store_.total_drawn);
            eps_trunc_ = truncationFactor(store_.total_drawn);
        }
        else
        {
            eps_infl_ = 1.0;
            eps_trunc_ = 1.0;
        }
    }

    double GitStarPlanner::potential(std::size_t v)
    {
        if (potential_stamp_[v] != batch_number_ + 1u)
        {
            const StateVec &anchor =
                config_.apf.attract_to_goal ? states_[kGoalId] : states_[kStartId];
            potential_[v] =
                potentialEnergy(states_[v], store_.invalid_samples, anchor, config_.apf);
            potential_stamp_[v] = batch_number_ + 1u;
        }
        return potential_[v];
    }

    std::vector<std::size_t> GitStarPlanner::neighborsOf(std::size_t v,
                                                         const SearchTree &tree)
    {
        if (nbr_stamp_[v] != batch_number_ + 1u)
        {
            nbr_cache_[v] = index_.query(states_[v], v);
            nbr_stamp_[v] = batch_number_ + 1u;
        }
        std::vector<std::size_t> result = nbr_cache_[v];
        auto addIfAbsent = [&result](std::size_t id) {
            if (std::find(result.begin(), result.end(), id) == result.end())
            {
                result.push_back(id);
            }
        };
        if (tree.contains(v) && v != tree.root())
        {
            addIfAbsent(tree.parent(v));
        }
        if (tree.contains(v))
        {
            for (const std::size_t c : tree.children(v))
            {
                addIfAbsent(c);
            }
        }
        std::erase_if(result, [&](std::size_t id) {
            return !active_[id] || invalid_edges_.contains(id, v);
        });
        return result;
    }

    double GitStarPlanner::wDyn(std::size_t t)
    {
        const auto nbrs = neighborsOf(t, reverse_tree_);
        std::size_t count = 0u;
        for (const std::size_t id : nbrs)
        {
            if (reverse_tree_.contains(id))
            {
                ++count;
            }
        }
        return static_cast<double>(count);
    }

    EdgeContext GitStarPlanner::edgeContext(std::size_t s, std::size_t t)
    {
        EdgeContext ctx;
        ctx.g_hat_t = g_hat_[t];
        ctx.h_hat_t = h_hat_[t];
        ctx.c_hat = distance(states_[s], states_[t]);
        ctx.e_bar_s = reverse_tree_.contains(s) ? reverse_tree_.effort(s) : 0.0;
        ctx.e_bar_edge =
            static_cast<double>(edgeEffort(states_[s], states_[t], resolution_));
        ctx.d_bar_t = d_bar_[t];
        ctx.dim = static_cast<double>(problem_.dimension);
        ctx.u_s = potential(s);
        ctx.u_t = potential(t);
        ctx.w_dyn = wDyn(t);
        ctx.n_samples = static_cast<double>(store_.total_drawn);
        return ctx;
    }

    std::tuple<double, double, double> GitStarPlanner::effortEstimates(std::size_t s,
                                                                       std::size_t t) const
    {
        if (!reverse_tree_.contains(s))
        {
            throw std::invalid_argument("effortEstimates: source not in reverse tree");
        }
        // Branch effort recomputed from the parent chain; the cached label
        // must agree.
        double branch = 0.0;
        std::size_t v = s;
        while (v != reverse_tree_.root())
        {
            const std::size_t p = reverse_tree_.parent(v);
            branch += static_cast<double>(edgeEffort(states_[p], states_[v], resolution_));
            v = p;
        }
        return {branch, static_cast<double>(edgeEffort(states_[s], states_[t], resolution_)),
                d_bar_[t]};
    }

    std::pair<double, double> GitStarPlanner::edgeKey(const EdgeContext &ctx) const
    {
        // Inflation scales the goal-directed terminal of the first component
        // only.
        EdgeContext inflated = ctx;
        inflated.g_hat_t *= eps_infl_;
        switch (config_.key_mode)
        {
            case KeyMode::GitStarWinner:
                return {gitKey(inflated).first, gitKey(ctx).second};
            case KeyMode::Baseline:
                return {baselineKey(inflated).first, baselineKey(ctx).second};
            case KeyMode::EvolvedFile:
                return {config_.evolved->primary.eval(inflated),
                        config_.evolved->tiebreak.eval(ctx)};
        }
        return {0.0, 0.0};
    }

    bool GitStarPlanner::sparseProbe(std::size_t a, std::size_t b)
    {
        // Endpoints are validated states; the probe checks the midpoint.
        const StateVec &pa = states_[a];
        const StateVec &pb = states_[b];
        StateVec mid(pa.size());
        for (std::size_t i = 0u; i < pa.size(); ++i)
        {
            mid[i] = 0.5 * (pa[i] + pb[i]);
        }
        ++state_checks_;
        return isStateValid(problem_, mid);
    }

    bool GitStarPlanner::validateEdge(std::size_t a, std::size_t b, double resolution)
    {
        const StateVec &pa = states_[a];
        const StateVec &pb = states_[b];
        const double dist = distance(pa, pb);
        const auto segments = static_cast<std::size_t>(std::ceil(dist / resolution));
        StateVec point(pa.size());
        // Endpoints are known-valid; interior states are checked outward-in
        // so obstacles near either end fail fast.
        for (std::size_t k = 1u; k < segments; ++k)
        {
            const std::size_t step = (k % 2u == 1u) ? (k + 1u) / 2u : segments - k / 2u;
            const double t = static_cast<double>(step) / static_cast<double>(segments);
            for (std::size_t i = 0u; i < pa.size(); ++i)
            {
                point[i] = pa[i] + t * (pb[i] - pa[i]);
            }
            ++state_checks_;
            if (!isStateValid(problem_, point))
            {
                return false;
            }
        }
        return true;
    }

    void GitStarPlanner::runReverseSearch()
    {
        // Before an incumbent exists, the pass is greedy: the key pulls the
        // tree toward the start and truncation stops soon after it is
        // reached. With an incumbent, the pass relaxes the (already pruned)
        // approximation to exhaustion so its labels can certify where the
        // forward search may still improve.
        const bool truncate = !std::isfinite(incumbent_cost_);
        reverse_tree_.reset(states_.size(), kGoalId);
        EdgeQueue queue;
        std::uint64_t seq = 0u;

        auto expand = [&](std::size_t v) {
            const double g_v = reverse_tree_.g(v);
            for (const std::size_t w : neighborsOf(v, reverse_tree_))
            {
                const double cand = g_v + distance(states_[v], states_[w]);
                if (!(cand + kCostEps < reverse_tree_.g(w)))
                {
                    continue;
                }
                const EdgeContext ctx = edgeContext(v, w);
                const auto key = edgeKey(ctx);
                queue.push(QueueEntry{key.first, key.second, seq++, v, w, ctx.c_hat});
            }
        };
        expand(kGoalId);

        std::optional<double> start_key;
        while (!queue.empty())
        {
            const QueueEntry entry = queue.top();
            queue.pop();
            if (truncate && start_key.has_value() &&
                entry.key1 > truncationBound(*start_key, eps_trunc_))
            {
                break;
            }
            const double cand_g = reverse_tree_.g(entry.from) + entry.c_hat;
            if (!(cand_g + kCostEps < reverse_tree_.g(entry.to)))
            {
                continue;
            }
            if (invalid_edges_.contains(entry.from, entry.to))
            {
                continue;
            }
            if (!sparseProbe(entry.from, entry.to))
            {
                invalid_edges_.insert(entry.from, entry.to);
                continue;
            }
            const double cand_effort =
                reverse_tree_.effort(entry.from) +
                static_cast<double>(
                    edgeEffort(states_[entry.from], states_[entry.to], resolution_));
            reverse_tree_.setEdge(entry.to, entry.from, cand_g, cand_effort);
            if (entry.to == kStartId && !start_key.has_value())
            {
                start_key = entry.key1;
            }
            expand(entry.to);
        }

        reverse_tree_.recomputeLabels(
            [this](std::size_t a, std::size_t b) {
                return distance(states_[a], states_[b]);
            },
            [this](std::size_t a, std::size_t b) {
                return static_cast<double>(edgeEffort(states_[a], states_[b], resolution_));
            });
    }

    bool GitStarPlanner::couldImproveForwardSearch() const
    {
        return reverse_tree_.contains(kStartId) &&
               reverse_tree_.g(kStartId) + kCostEps < incumbent_cost_;
    }

    GitStarPlanner::ForwardStatus GitStarPlanner::forwardPass()
    {
        EdgeQueue queue;
        std::uint64_t seq = 0u;
        std::size_t invalid_found = 0u;

        auto hR = [this](std::size_t v) { return reverse_tree_.g(v); };
        // The pruning bound tightens as the pass itself improves the goal.
        auto bound = [this]() {
            return std::min(incumbent_cost_, forward_tree_.g(kGoalId));
        };

        auto expand = [&](std::size_t v) {
            const double g_v = forward_tree_.g(v);
            for (const std::size_t w : neighborsOf(v, forward_tree_))
            {
                const double c = distance(states_[v], states_[w]);
                if (g_v + c + kCostEps >= forward_tree_.g(w))
                {
                    continue;
                }
                // Inadmissible reverse labels order the queue; the admissible
                // bound prunes what provably cannot improve the incumbent.
                if (g_v + c + h_hat_[w] >= bound() - kCostEps)
                {
                    continue;
                }
                const double f = g_v + c + hR(w);
                if (!std::isfinite(f))
                {
                    continue;
                }
                queue.push(QueueEntry{f, g_v + c, seq++, v, w, c});
            }
        };

        for (const std::size_t v : forward_tree_.vertices())
        {
            expand(v);
        }

        // Until a first solution exists the pass returns the moment the goal
        // is reached; afterwards it settles to truncation so one pass yields
        // one consolidated improvement.
        const bool stop_at_goal = !std::isfinite(incumbent_cost_);
        bool improved = false;
        while (!queue.empty())
        {
            const QueueEntry entry = queue.top();
            queue.pop();
            if (eps_trunc_ * entry.key1 >= bound() - kCostEps)
            {
                break;
            }
            if (!forward_tree_.contains(entry.from))
            {
                continue;
            }
            const double g_from = forward_tree_.g(entry.from);
            const double cand_g = g_from + entry.c_hat;
            if (!(cand_g + kCostEps < forward_tree_.g(entry.to)))
            {
                continue;
            }
            if (cand_g + h_hat_[entry.to] >= bound() - kCostEps)
            {
                continue;
            }
            if (invalid_edges_.contains(entry.from, entry.to))
            {
                continue;
            }
            if (!validated_edges_.contains(entry.from, entry.to))
            {
                if (!validateEdge(entry.from, entry.to, resolution_))
                {
                    invalid_edges_.insert(entry.from, entry.to);
                    ++invalid_found;
                    continue;
                }
                validated_edges_.insert(entry.from, entry.to);
            }
            forward_tree_.setEdge(entry.to, entry.from, cand_g,
                                  forward_tree_.effort(entry.from) + 1.0);
            if (entry.to == kGoalId)
            {
                improved = true;
                if (stop_at_goal)
                {
                    break;
                }
                continue;
            }
            expand(entry.to);
        }

        forward_tree_.recomputeLabels(
            [this](std::size_t a, std::size_t b) {
                return distance(states_[a], states_[b]);
            },
            [](std::size_t, std::size_t) { return 1.0; });

        if (improved || forward_tree_.g(kGoalId) + kCostEps < incumbent_cost_)
        {
            return ForwardStatus::ImprovedIncumbent;
        }
        return invalid_found > 0u ? ForwardStatus::InvalidEdgesFound
                                  : ForwardStatus::Exhausted;
    }

    PathResult GitStarPlanner::extractPath() const
    {
        PathResult path;
        std::size_t v = kGoalId;
        while (true)
        {
            path.states.push_back(states_[v]);
            if (v == kStartId)
            {
                break;
            }
            v = forward_tree_.parent(v);
        }
        std::reverse(path.states.begin(), path.states.end());
        path.cost = path.recomputeCost();
        return path;
    }

    bool GitStarPlanner::recordImprovementIfBetter(const ProgressSink &sink)
    {
        if (!forward_tree_.contains(kGoalId))
        {
            return false;
        }
        std::vector<std::size_t> ids;
        for (std::size_t v = kGoalId;; v = forward_tree_.parent(v))
        {
            ids.push_back(v);
            if (v == kStartId)
            {
                break;
            }
        }
        std::reverse(ids.begin(), ids.end());

        PathResult candidate;
        candidate.states.reserve(ids.size());
        for (const std::size_t id : ids)
        {
            candidate.states.push_back(states_[id]);
        }
        candidate.cost = candidate.recomputeCost();
        if (!(candidate.cost + kCostEps < incumbent_cost_))
        {
            return false;
        }
        // Solution edges are held to a 10x finer standard than ordinary tree
        // edges; a failure sheds the offending branch and reports it back.
        for (std::size_t i = 1u; i < ids.size(); ++i)
        {
            if (fine_validated_.contains(ids[i - 1u], ids[i]))
            {
                continue;
            }
            if (!validateEdge(ids[i - 1u], ids[i], 0.1 * resolution_))
            {
                invalid_edges_.insert(ids[i - 1u], ids[i]);
                forward_tree_.removeSubtree(ids[i]);
                return false;
            }
            fine_validated_.insert(ids[i - 1u], ids[i]);
        }
        incumbent_cost_ = candidate.cost;
        informed_measure_ = informedMeasure(c_min_, incumbent_cost_, problem_.dimension);
        const Improvement improvement{progressStamp(), candidate.cost};
        if (result_.improvements.empty())
        {
            result_.t_init = improvement.t;
            result_.c_init = improvement.cost;
            result_.checks_to_first = state_checks_;
        }
        result_.improvements.push_back(improvement);
        result_.c_final = improvement.cost;
        result_.success = true;
        result_.path = std::move(candidate);
        if (sink)
        {
            sink(improvement);
        }
        return true;
    }

    void GitStarPlanner::improveForward(const ProgressSink &sink)
    {
        bool improved = false;
        for (int guard = 0; guard < 1000; ++guard)
        {
            if (!couldImproveForwardSearch() || wallClockExpired())
            {
                break;
            }
            const ForwardStatus status = forwardPass();
            if (status == ForwardStatus::ImprovedIncumbent)
            {
                if (recordImprovementIfBetter(sink))
                {
                    improved = true;
                    continue;
                }
                if (!forward_tree_.contains(kGoalId))
                {
                    // A solution edge failed fine validation; repair and retry.
                    runReverseSearch();
                    continue;
                }
                break;
            }
            if (status == ForwardStatus::InvalidEdgesFound)
            {
                runReverseSearch();
                continue;
            }
            break;
        }
        if (improved)
        {
            pruneNow();
        }
    }

    std::size_t GitStarPlanner::pruneNow()
    {
        if (!std::isfinite(incumbent_cost_))
        {
            return 0u;
        }
        std::size_t removed = 0u;
        for (std::size_t id = 2u; id < states_.size(); ++id)
        {
            if (!active_[id])
            {
                continue;
            }
            if (g_hat_[id] + h_hat_[id] >= incumbent_cost_)
            {
                active_[id] = false;
                --active_samples_;
                ++removed;
                if (forward_tree_.contains(id))
                {
                    forward_tree_.removeSubtree(id);
                }
                if (reverse_tree_.contains(id))
                {
                    reverse_tree_.removeSubtree(id);
                }
            }
        }
        const std::size_t invalid_before = store_.invalid_samples.size();
        std::erase_if(store_.invalid_samples, [&](const StateVec &x) {
            return gHat(problem_, x) + hHat(problem_, x) >= incumbent_cost_;
        });
        removed += invalid_before - store_.invalid_samples.size();
        return removed;
    }

    PlanResult GitStarPlanner::solve(const ProgressSink &sink)
    {
        start_time_ = std::chrono::steady_clock::now();
        while (!budgetExpired() && !exhausted_)
        {
            addBatch();
            runReverseSearch();
            improveForward(sink);
#ifndef NDEBUG
            forward_tree_.checkInvariants([this](std::size_t a, std::size_t b) {
                return distance(states_[a], states_[b]);
            });
#endif
        }
        result_.state_checks = state_checks_;
        result_.batches = batch_number_;
        result_.samples_drawn = store_.total_drawn;
        return result_;
    }

    PlanResult plan(const ProblemInstance &problem, const PlannerConfig &config,
                    std::uint64_t seed, const ProgressSink &sink)
    {
        GitStarPlanner planner(problem, config, seed);
        return planner.solve(sink);
    }
}  // namespace gitstar
