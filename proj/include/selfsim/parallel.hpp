#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "selfsim/errors.hpp"

namespace selfsim {

/// Worker count actually used: the SSS_THREADS environment variable, when
/// set, overrides whatever the config asked for.
inline int effective_workers(int configured) {
    const char* env = std::getenv("SSS_THREADS");
    if (!env || !*env) return configured;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 4096)
        throw ConfigError(std::string("SSS_THREADS must be a positive integer, got '") +
                          env + "'");
    return static_cast<int>(v);
}

/// Runs body(0..n-1) on a pool of `workers` threads pulling indices off an
/// atomic counter. Joins before returning; the first exception thrown by any
/// worker is rethrown on the calling thread. Callers own any output layout
/// (typically a pre-sized vector indexed by i), so completion order never
/// shows through.
template <class F>
void parallel_for(int n, int workers, F&& body) {
    if (n <= 0) return;
    if (workers > n) workers = n;
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }

    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            const int i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(n, std::memory_order_relaxed); // drain remaining work
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(run);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

/// parallel_for with a result slot per index; results sit in input order
/// regardless of which worker produced them.
template <class T, class F>
std::vector<T> parallel_map(int n, int workers, F&& fn) {
    std::vector<T> out(static_cast<std::size_t>(std::max(n, 0)));
    parallel_for(n, workers, [&](int i) { out[static_cast<std::size_t>(i)] = fn(i); });
    return out;
}

} // namespace selfsim
