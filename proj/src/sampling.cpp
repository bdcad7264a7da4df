#include "gitstar/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "gitstar/heuristics.hpp"

namespace gitstar
{
    std::size_t sampleBatch(const ProblemInstance &problem, SampleStore &store,
                            std::mt19937_64 &rng, double incumbent_cost,
                            std::uint64_t *check_counter)
    {
        const auto n = static_cast<std::size_t>(problem.dimension);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        StateVec draw(n);

        std::size_t accepted = 0u;
        std::uint64_t draws = 0u;
        while (accepted < store.batch_size)
        {
            if (++draws > store.draw_cap_per_batch)
            {
                throw SamplingExhausted("draw cap reached before filling the batch");
            }
            for (std::size_t i = 0u; i < n; ++i)
            {
                draw[i] = unit(rng);
            }
            // Informed rejection happens before any validity check and leaves
            // no trace in the store.
            if (gHat(problem, draw) + hHat(problem, draw) >= incumbent_cost)
            {
                continue;
            }
            ++store.total_drawn;
            if (check_counter != nullptr)
            {
                ++(*check_counter);
            }
            if (isStateValid(problem, draw))
            {
                store.valid_samples.push_back(draw);
                ++accepted;
            }
            else
            {
                store.invalid_samples.push_back(draw);
                if (store.invalid_samples.size() > store.invalid_cap)
                {
                    store.invalid_samples.erase(store.invalid_samples.begin());
                }
            }
        }
        return accepted;
    }

    double unitBallVolume(int d)
    {
        const double half_d = 0.5 * static_cast<double>(d);
        return std::pow(M_PI, half_d) / std::tgamma(half_d + 1.0);
    }

    double informedMeasure(double c_min, double c, int d)
    {
        if (!std::isfinite(c))
        {
            return 1.0;
        }
        if (c <= c_min)
        {
            return 0.0;
        }
        const double transverse = 0.5 * c;
        const double conjugate = 0.5 * std::sqrt(c * c - c_min * c_min);
        const double volume =
            unitBallVolume(d) * transverse * std::pow(conjugate, static_cast<double>(d - 1));
        return std::min(1.0, volume);
    }

    double rggRadius(std::size_t q, int d, double informed_measure, double eta)
    {
        if (q < 2u)
        {
            throw std::invalid_argument("rggRadius requires q >= 2");
        }
        const double dd = static_cast<double>(d);
        const double qd = static_cast<double>(q);
        const double term = 2.0 * (1.0 + 1.0 / dd) * (informed_measure / unitBallVolume(d)) *
                            (std::log(qd) / qd);
        return eta * std::pow(term, 1.0 / dd);
    }

    void NeighborIndex::rebuild(const std::vector<StateVec> &states,
                                const std::vector<std::size_t> &ids, double radius)
    {
        states_ = &states;
        radius_ = radius;
        indexed_ = ids.size();

        const auto dim = states.empty() ? 0u : states.front().size();
        // Grid resolution per axis: cells at least one radius wide, total
        // cell count bounded so high dimensions degrade to coarser grids.
        std::size_t m = radius > 0.0
                            ? std::max<std::size_t>(
                                  1u, static_cast<std::size_t>(std::floor(1.0 / radius)))
                            : 1u;
        while (m > 1u && std::pow(static_cast<double>(m), static_cast<double>(dim)) >
                             static_cast<double>(1u << 18u))
        {
            m /= 2u;
        }
        grid_dims_.assign(dim, m);
        cell_size_ = 1.0 / static_cast<double>(m);

        std::size_t total_cells = 1u;
        for (std::size_t i = 0u; i < dim; ++i)
        {
            total_cells *= m;
        }
        cells_.assign(total_cells, {});
        for (const auto id : ids)
        {
            cells_[cellOf(states[id])].push_back(id);
        }
    }

    std::size_t NeighborIndex::cellOf(const StateVec &x) const
    {
        std::size_t index = 0u;
        for (std::size_t i = 0u; i < x.size(); ++i)
        {
            const auto m = grid_dims_[i];
            auto c = static_cast<std::size_t>(x[i] / cell_size_);
            c = std::min(c, m - 1u);
            index = index * m + c;
        }
        return index;
    }

    std::vector<std::size_t> NeighborIndex::query(const StateVec &x,
                                                  std::size_t exclude_id) const
    {
        std::vector<std::size_t> result;
        const auto dim = x.size();
        if (states_ == nullptr || cells_.empty() || grid_dims_.size() != dim)
        {
            return result;
        }
        const double r_sq = radius_ * radius_;

        // Cell ranges overlapping the query ball, walked with an odometer.
        std::vector<std::size_t> lo(dim), hi(dim), cursor(dim);
        for (std::size_t i = 0u; i < dim; ++i)
        {
            const auto m = grid_dims_[i];
            const double a = std::max(0.0, x[i] - radius_);
            const double b = std::min(1.0, x[i] + radius_);
            lo[i] = std::min(static_cast<std::size_t>(a / cell_size_), m - 1u);
            hi[i] = std::min(static_cast<std::size_t>(b / cell_size_), m - 1u);
            cursor[i] = lo[i];
        }

        while (true)
        {
            std::size_t cell = 0u;
            for (std::size_t i = 0u; i < dim; ++i)
            {
                cell = cell * grid_dims_[i] + cursor[i];
            }
            for (const auto id : cells_[cell])
            {
                if (id == exclude_id)
                {
                    continue;
                }
                if (squaredDistance(x, (*states_)[id]) <= r_sq)
                {
                    result.push_back(id);
                }
            }

            std::size_t axis = dim;
            while (axis > 0u)
            {
                --axis;
                if (cursor[axis] < hi[axis])
                {
                    ++cursor[axis];
                    break;
                }
                cursor[axis] = lo[axis];
                if (axis == 0u)
                {
                    return result;
                }
            }
        }
    }

    std::vector<std::size_t> neighbors(std::size_t x_t, const std::vector<StateVec> &states,
                                       const NeighborIndex &index,
                                       std::optional<std::size_t> parent,
                                       const std::vector<std::size_t> &children,
                                       const EdgeSet &invalid_edges)
    {
        std::vector<std::size_t> result = index.query(states[x_t], x_t);
        auto addIfAbsent = [&result](std::size_t id) {
            if (std::find(result.begin(), result.end(), id) == result.end())
            {
                result.push_back(id);
            }
        };
        if (parent.has_value())
        {
            addIfAbsent(*parent);
        }
        for (const auto child : children)
        {
            addIfAbsent(child);
        }
        std::erase_if(result, [&](std::size_t id) { return invalid_edges.contains(id, x_t); });
        return result;
    }
}  // namespace gitstar
