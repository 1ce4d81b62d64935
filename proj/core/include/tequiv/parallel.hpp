#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tequiv {

/// Runs f(chunk_index, begin, end) over [0, n) split into fixed chunks.
///
/// The chunk layout depends only on n and `chunks`, never on the thread
/// count, so callers that merge per-chunk results in chunk order get the
/// same output with or without threads.
template <class F>
void parallel_chunks(std::size_t n, std::size_t chunks, bool parallel, F&& f) {
    chunks = std::max<std::size_t>(1, std::min(chunks, n == 0 ? 1 : n));
    const std::size_t step = (n + chunks - 1) / chunks;
    auto bounds = [&](std::size_t c) {
        const std::size_t b = std::min(n, c * step);
        return std::pair{b, std::min(n, b + step)};
    };
    const unsigned hw = std::max(1U, std::thread::hardware_concurrency());
    if (!parallel || hw == 1 || chunks == 1) {
        for (std::size_t c = 0; c < chunks; ++c) {
            auto [b, e] = bounds(c);
            f(c, b, e);
        }
        return;
    }
    std::exception_ptr first_error;
    std::mutex m;
    std::size_t next = 0;
    auto worker = [&] {
        for (;;) {
            std::size_t c;
            {
                std::lock_guard lock(m);
                if (next >= chunks || first_error) return;
                c = next++;
            }
            try {
                auto [b, e] = bounds(c);
                f(c, b, e);
            } catch (...) {
                std::lock_guard lock(m);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(hw, chunks); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline constexpr std::size_t kDefaultChunks = 64;

}  // namespace tequiv
