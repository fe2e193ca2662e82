#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace secrecy {

// Worker count from SECRECY_REGIONS_THREADS; 0 or unset means auto.
inline unsigned worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("SECRECY_REGIONS_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return hw;
}

// Runs fn(begin, end, worker_index) over contiguous chunks of [0, n).
// Callers must merge per-worker results in worker order so the outcome does
// not depend on scheduling. The first worker exception is rethrown here.
inline void parallel_chunks(std::uint64_t n,
                            const std::function<void(std::uint64_t, std::uint64_t, unsigned)>& fn) {
    if (n == 0) return;
    unsigned workers = worker_count();
    if (workers > n) workers = static_cast<unsigned>(n);
    if (workers <= 1) {
        fn(0, n, 0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::vector<std::exception_ptr> errors(workers);
    const std::uint64_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t b = std::min<std::uint64_t>(n, w * chunk);
        const std::uint64_t e = std::min<std::uint64_t>(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, &errors, b, e, w] {
            try {
                fn(b, e, w);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
}

}  // namespace secrecy
