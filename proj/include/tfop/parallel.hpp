#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace tfop {

// Thread cap: min(hardware, TFOP_THREADS). Unset or invalid env means the
// hardware count.
inline int thread_cap() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("TFOP_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && static_cast<unsigned>(cap) < hw) return static_cast<int>(cap);
    }
    return static_cast<int>(hw);
}

// Static block split over [0, count). Each worker owns a disjoint index
// range, so results are identical to the serial loop.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const int threads = thread_cap();
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            const std::size_t lo = count * w / workers;
            const std::size_t hi = count * (w + 1) / workers;
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace tfop
