#pragma once

// Order-preserving parallel map over an index range. PEPBOUND_THREADS caps
// the worker count (0 or unset = hardware concurrency).

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

namespace pepbound {

inline unsigned worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PEPBOUND_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) hw = static_cast<unsigned>(v);
        } catch (const std::exception&) {
            // unparsable value: keep the default
        }
    }
    return hw;
}

/// results[i] = f(i). The first exception (in index order) is rethrown after all workers join.
template <typename F>
auto parallel_map(std::size_t count, F&& f, bool parallel = true) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
    using R = std::invoke_result_t<F&, std::size_t>;
    std::vector<R> results(count);
    const unsigned workers = parallel ? static_cast<unsigned>(std::min<std::size_t>(worker_count(), count)) : 1u;
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) results[i] = f(i);
        return results;
    }
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                results[i] = f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

}  // namespace pepbound
