// Copyright (c) 2026 sstrace contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace sst {

/// Worker count: SST_THREADS overrides hardware concurrency.
inline unsigned thread_count() {
    if (const char* env = std::getenv("SST_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n > 0) return static_cast<unsigned>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/// Runs fn(i) for i in [0, n). Work items must not depend on execution order;
/// outputs written per index stay deterministic under any thread count.
inline void parallel_for(std::uint64_t n, const std::function<void(std::uint64_t)>& fn,
                         std::uint64_t chunk = 0) {
    const unsigned workers = thread_count();
    if (workers <= 1 || n < 2) {
        for (std::uint64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    if (chunk == 0) chunk = std::max<std::uint64_t>(1, n / (workers * 16));

    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t begin = next.fetch_add(chunk);
            if (begin >= n) return;
            const std::uint64_t end = std::min(begin + chunk, n);
            for (std::uint64_t i = begin; i < end; ++i) fn(i);
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

}  // namespace sst
