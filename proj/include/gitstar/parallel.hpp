#ifndef GITSTAR_PARALLEL_HPP
#define GITSTAR_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace gitstar
{
    /// Runs fn(0..n-1) across up to `jobs` workers. Results must be written
    /// to per-index slots; iteration order is unspecified beyond that.
    inline void parallelFor(std::size_t n, std::size_t jobs,
                            const std::function<void(std::size_t)> &fn)
    {
        if (n == 0u)
        {
            return;
        }
        if (jobs <= 1u || n == 1u)
        {
            for (std::size_t i = 0u; i < n; ++i)
            {
                fn(i);
            }
            return;
        }
        std::atomic<std::size_t> next{0u};
        auto worker = [&]() {
            while (true)
            {
                const std::size_t i = next.fetch_add(1u);
                if (i >= n)
                {
                    return;
                }
                fn(i);
            }
        };
        std::vector<std::thread> threads;
        const std::size_t count = std::min(jobs, n);
        threads.reserve(count);
        for (std::size_t t = 0u; t < count; ++t)
        {
            threads.emplace_back(worker);
        }
        for (auto &thread : threads)
        {
            thread.join();
        }
    }
}  // namespace gitstar

#endif
