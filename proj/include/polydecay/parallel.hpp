#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace polydecay {

/// Worker count from POLYDECAY_THREADS; 1 when unset or invalid.
inline unsigned configured_threads() {
    const char* env = std::getenv("POLYDECAY_THREADS");
    if (!env) return 1;
    try {
        long n = std::stol(env);
        return n > 0 ? unsigned(std::min(n, 256L)) : 1u;
    } catch (...) {
        return 1;
    }
}

/// Runs body(i) for i in [0, count). Results must be written to
/// preassigned slots; the first exception is rethrown after all workers join.
template <class Body>
void parallel_for(std::size_t count, Body&& body, unsigned threads = configured_threads()) {
    threads = unsigned(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i; (i = next.fetch_add(1)) < count;) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
                next = count;
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace polydecay
