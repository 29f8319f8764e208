#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace vamp {

/// Run task(0..count-1) on up to `threads` workers. Tasks must be
/// independent; results are identical to the serial order by construction
/// (callers index into preallocated storage).
inline void parallel_for(std::size_t count, int threads,
                         const std::function<void(std::size_t)>& task) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            task(i);
        }
    };
    std::vector<std::thread> pool;
    const auto n = static_cast<std::size_t>(
        std::min<std::size_t>(static_cast<std::size_t>(threads), count));
    pool.reserve(n);
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

} // namespace vamp
