#ifndef GITSTAR_PLANNER_HPP
#define GITSTAR_PLANNER_HPP

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <tuple>
#include <utility>
#include <vector>

#include "gitstar/gp.hpp"
#include "gitstar/heuristics.hpp"
#include "gitstar/sampling.hpp"
#include "gitstar/world.hpp"

namespace gitstar
{
    /// The winner reverse-queue key: cost-and-potential first component,
    /// effort tiebreak.
    std::pair<double, double> gitKey(const EdgeContext &ctx);

    /// Control key: linear combination of Euclidean distance and effort.
    std::pair<double, double> baselineKey(const EdgeContext &ctx);

    double inflationFactor(int dimension, std::uint64_t n_samples);
    double truncationFactor(std::uint64_t n_samples);

    enum class KeyMode
    {
        GitStarWinner,
        Baseline,
        EvolvedFile
    };

    struct PlannerConfig
    {
        std::size_t batch_size = 100u;
        double rgg_eta = 1.001;
        double rewire_factor = 1.2;
        double edge_resolution = 0.0;  // 0 -> defaultEdgeResolution(dimension)
        ApfConfig apf;
        KeyMode key_mode = KeyMode::GitStarWinner;
        std::optional<ExprIndividual> evolved;
        double time_limit_s = 1.0;
        /// When set, the run executes exactly this many batches and reports
        /// effort (collision checks) instead of wall-clock time, which makes
        /// results machine-independent.
        std::optional<std::uint64_t> batch_budget;
        bool use_adaptive_factors = true;
        std::uint64_t draw_cap = 1000000u;
    };

    /// One strict improvement: t is seconds in wall-clock mode, cumulative
    /// collision checks in batch-budget mode.
    struct Improvement
    {
        double t = 0.0;
        double cost = 0.0;
    };

    struct PlanResult
    {
        bool success = false;
        double t_init = std::numeric_limits<double>::infinity();
        double c_init = std::numeric_limits<double>::infinity();
        double c_final = std::numeric_limits<double>::infinity();
        std::vector<Improvement> improvements;
        std::optional<PathResult> path;
        std::uint64_t state_checks = 0u;
        std::uint64_t checks_to_first = 0u;
        std::uint64_t batches = 0u;
        std::uint64_t samples_drawn = 0u;
    };

    using ProgressSink = std::function<void(const Improvement &)>;

    /// Parent-pointer tree over state ids with cost and effort labels.
    class SearchTree
    {
    public:
        static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

        void reset(std::size_t n_states, std::size_t root);
        void ensureSize(std::size_t n_states);

        std::size_t root() const { return root_; }
        bool contains(std::size_t v) const;
        std::size_t parent(std::size_t v) const { return parent_[v]; }
        const std::vector<std::size_t> &children(std::size_t v) const
        {
            return children_[v];
        }
        double g(std::size_t v) const { return g_[v]; }
        double effort(std::size_t v) const { return effort_[v]; }
        std::size_t size() const { return count_; }

        /// Attaches or rewires child under parent with the given labels.
        void setEdge(std::size_t child, std::size_t new_parent, double g, double effort);

        /// Detaches v and its whole subtree; labels revert to infinity.
        void removeSubtree(std::size_t v);

        /// Re-derives g and effort labels from the parent structure.
        void recomputeLabels(
            const std::function<double(std::size_t, std::size_t)> &edge_cost,
            const std::function<double(std::size_t, std::size_t)> &edge_effort);

        std::vector<std::size_t> vertices() const;

        /// Throws std::logic_error on acyclicity, parent/children, or label
        /// consistency violations.
        void checkInvariants(
            const std::function<double(std::size_t, std::size_t)> &edge_cost) const;

    private:
        std::size_t root_ = kNone;
        std::size_t count_ = 0u;
        std::vector<std::size_t> parent_;
        std::vector<std::vector<std::size_t>> children_;
        std::vector<double> g_;
        std::vector<double> effort_;
    };

    /// Anytime batched bidirectional planner: lazy reverse search orders
    /// edges by a pluggable key; the forward search validates at full
    /// resolution and repairs the reverse tree on conflicts.
    class GitStarPlanner
    {
    public:
        GitStarPlanner(const ProblemInstance &problem, PlannerConfig config,
                       std::uint64_t seed);

        PlanResult solve(const ProgressSink &sink = nullptr);

        // Stepwise interface, used by the tests.
        std::size_t addBatch();
        void runReverseSearch();
        /// Runs forward passes (with reverse repairs) until no further
        /// improvement is possible this batch; prunes on improvement.
        void improveForward(const ProgressSink &sink = nullptr);
        std::size_t pruneNow();
        bool couldImproveForwardSearch() const;

        const SearchTree &reverseTree() const { return reverse_tree_; }
        const SearchTree &forwardTree() const { return forward_tree_; }
        const EdgeSet &invalidEdges() const { return invalid_edges_; }
        const SampleStore &store() const { return store_; }
        const std::vector<StateVec> &states() const { return states_; }
        bool isActive(std::size_t id) const { return active_[id]; }
        double incumbentCost() const { return incumbent_cost_; }
        double radius() const { return radius_; }
        double resolution() const { return resolution_; }
        std::uint64_t stateChecks() const { return state_checks_; }
        std::size_t startId() const { return kStartId; }
        std::size_t goalId() const { return kGoalId; }

        /// Terminal bindings for the edge (s, t) under the current caches.
        EdgeContext edgeContext(std::size_t s, std::size_t t);

        /// Effort estimates from the reverse tree: branch effort of s, edge
        /// effort of (s, t), and remaining effort of t.
        std::tuple<double, double, double> effortEstimates(std::size_t s, std::size_t t) const;

        std::vector<std::size_t> neighborsOf(std::size_t v, const SearchTree &tree);

    private:
        static constexpr std::size_t kStartId = 0u;
        static constexpr std::size_t kGoalId = 1u;

        enum class ForwardStatus
        {
            ImprovedIncumbent,
            InvalidEdgesFound,
            Exhausted
        };

        std::size_t registerState(const StateVec &x);
        void rebuildApproximation();
        double potential(std::size_t v);
        double wDyn(std::size_t t);
        std::pair<double, double> edgeKey(const EdgeContext &ctx) const;
        bool sparseProbe(std::size_t a, std::size_t b);
        bool validateEdge(std::size_t a, std::size_t b, double resolution);
        ForwardStatus forwardPass();
        PathResult extractPath() const;
        bool recordImprovementIfBetter(const ProgressSink &sink);
        double elapsedSeconds() const;
        double progressStamp() const;
        bool budgetExpired() const;
        bool wallClockExpired() const;

        const ProblemInstance &problem_;
        PlannerConfig config_;
        std::mt19937_64 rng_;
        double resolution_;
        double c_min_;

        SampleStore store_;
        std::vector<StateVec> states_;
        std::vector<bool> active_;
        std::vector<double> g_hat_;
        std::vector<double> h_hat_;
        std::vector<double> d_bar_;
        std::vector<double> potential_;
        std::vector<std::uint64_t> potential_stamp_;
        std::vector<std::vector<std::size_t>> nbr_cache_;
        std::vector<std::uint64_t> nbr_stamp_;
        std::size_t active_samples_ = 0u;

        NeighborIndex index_;
        double radius_ = 0.0;
        double informed_measure_ = 1.0;
        double eps_infl_ = 1.0;
        double eps_trunc_ = 1.0;

        SearchTree reverse_tree_;
        SearchTree forward_tree_;
        EdgeSet invalid_edges_;
        EdgeSet validated_edges_;
        EdgeSet fine_validated_;

        double incumbent_cost_ = std::numeric_limits<double>::infinity();
        PlanResult result_;
        std::uint64_t state_checks_ = 0u;
        std::uint64_t batch_number_ = 0u;
        std::chrono::steady_clock::time_point start_time_;
        bool exhausted_ = false;
    };

    /// Runs the full anytime loop on a fresh planner.
    PlanResult plan(const ProblemInstance &problem, const PlannerConfig &config,
                    std::uint64_t seed, const ProgressSink &sink = nullptr);
}  // namespace gitstar

#endif
