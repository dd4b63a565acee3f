// Deterministic static-partition parallel loop. Work items write disjoint
// slots, so results are bitwise identical for every thread count.
#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace spme {

struct ExecPolicy {
    int threads = 1;
};

template <class Fn> // Fn(std::int64_t begin, std::int64_t end)
void parallel_for(std::int64_t count, int threads, Fn&& fn) {
    if (count <= 0) return;
    if (threads <= 1 || count == 1) {
        fn(0, count);
        return;
    }
    int t = int(std::min<std::int64_t>(threads, count));
    std::vector<std::thread> pool;
    pool.reserve(t);
    std::int64_t chunk = (count + t - 1) / t;
    for (int i = 0; i < t; ++i) {
        std::int64_t begin = i * chunk;
        std::int64_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& th : pool) th.join();
}

} // namespace spme
