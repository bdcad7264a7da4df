#ifndef GITSTAR_SAMPLING_HPP
#define GITSTAR_SAMPLING_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "gitstar/world.hpp"

namespace gitstar
{
    class SamplingExhausted : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    struct SampleStore
    {
        std::vector<StateVec> valid_samples;
        std::vector<StateVec> invalid_samples;
        std::size_t batch_size = 100u;

        /// Validity-checked draws so far (valid + invalid); informed-set
        /// rejections are not counted. Monotone, unaffected by pruning.
        std::uint64_t total_drawn = 0u;

        /// Oldest invalid samples are evicted past this cap.
        std::size_t invalid_cap = 50000u;
        std::uint64_t draw_cap_per_batch = 1000000u;
    };

    /// Draws uniformly until batch_size valid samples are accepted. With an
    /// incumbent cost, draws outside the informed set are rejected before any
    /// validity check and never recorded. Throws SamplingExhausted at the
    /// draw cap.
    std::size_t sampleBatch(const ProblemInstance &problem, SampleStore &store,
                            std::mt19937_64 &rng,
                            double incumbent_cost = std::numeric_limits<double>::infinity(),
                            std::uint64_t *check_counter = nullptr);

    /// Lebesgue measure of the unit ball in R^d.
    double unitBallVolume(int d);

    /// Measure of the prolate hyperspheroid with focal distance c_min and
    /// transverse diameter c, clipped to the unit cube.
    double informedMeasure(double c_min, double c, int d);

    /// RGG rewiring radius bound for q samples in a region of the given
    /// measure; natural log, eta just above 1.
    double rggRadius(std::size_t q, int d, double informed_measure, double eta = 1.001);

    /// Undirected edge set keyed on state ids.
    class EdgeSet
    {
    public:
        void insert(std::size_t a, std::size_t b) { edges_.insert(key(a, b)); }
        bool contains(std::size_t a, std::size_t b) const
        {
            return edges_.count(key(a, b)) > 0u;
        }
        std::size_t size() const { return edges_.size(); }
        void clear() { edges_.clear(); }

    private:
        static std::uint64_t key(std::size_t a, std::size_t b)
        {
            const auto lo = static_cast<std::uint64_t>(std::min(a, b));
            const auto hi = static_cast<std::uint64_t>(std::max(a, b));
            return (hi << 32u) | lo;
        }
        std::unordered_set<std::uint64_t> edges_;
    };

    /// Exact fixed-radius index over a set of states addressed by id.
    /// Backed by a uniform grid; results match a linear scan exactly.
    class NeighborIndex
    {
    public:
        /// Indexes the states whose ids appear in `ids`; `radius` fixes the
        /// grid cell size and the query radius used by query().
        void rebuild(const std::vector<StateVec> &states, const std::vector<std::size_t> &ids,
                     double radius);

        /// Ids within `radius` of x, excluding `exclude_id`. Unsorted.
        std::vector<std::size_t> query(const StateVec &x, std::size_t exclude_id) const;

        double radius() const { return radius_; }
        std::size_t size() const { return indexed_; }

    private:
        std::size_t cellOf(const StateVec &x) const;

        const std::vector<StateVec> *states_ = nullptr;
        std::vector<std::vector<std::size_t>> cells_;
        std::vector<std::size_t> grid_dims_;
        double radius_ = 0.0;
        double cell_size_ = 0.0;
        std::size_t indexed_ = 0u;
    };

    /// Radius neighbors of x_t, with the tree parent and children unioned in
    /// and partners of known-invalid edges removed.
    std::vector<std::size_t> neighbors(std::size_t x_t, const std::vector<StateVec> &states,
                                       const NeighborIndex &index,
                                       std::optional<std::size_t> parent,
                                       const std::vector<std::size_t> &children,
                                       const EdgeSet &invalid_edges);
}  // namespace gitstar

#endif
