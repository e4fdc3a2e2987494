#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace loopmc {

using Rng = std::mt19937_64;

/// Independent stream for replica `index` of a run seeded with `master`.
/// The mapping depends only on the pair, never on scheduling.
inline Rng make_stream(std::uint64_t master, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      0x6c6f6f70u};
    return Rng(seq);
}

/// `requested` if nonzero, else LOOPMC_WORKERS from the environment, else
/// the hardware concurrency.
unsigned worker_count(unsigned requested = 0);

/// Runs body(i) for every i in [0, n) on up to `workers` threads. The first
/// exception thrown by any body is rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body)
{
    workers = worker_count(workers);
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        const auto n_threads = std::min<std::size_t>(workers, n);
        for (std::size_t w = 0; w < n_threads; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure)
                            failure = std::current_exception();
                        next = n;
                    }
                }
            });
        }
    }
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace loopmc
