#pragma once

// Deterministic randomness for scans: every sampled object draws from an
// engine seeded by (seed, index), so results are independent of thread
// schedule and identical across runs.

#include <cstdint>
#include <random>
#include <thread>
#include <vector>
#include <functional>

#include "reflecta/linalg.hpp"

namespace reflecta {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 rng_for(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x51ed270b0f4dULL)));
}

inline Vec gaussian_vector(std::mt19937_64& g, int n) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Vec v(n);
    for (double& x : v) x = nd(g);
    return v;
}

// Rotation-invariant distribution on the sphere.
inline Vec random_unit_vector(std::mt19937_64& g, int n) {
    for (;;) {
        Vec v = gaussian_vector(g, n);
        const double m = norm(v);
        if (m > 1e-8) {
            for (double& x : v) x /= m;
            return v;
        }
    }
}

inline Vec random_in_ball(std::mt19937_64& g, int n, double radius) {
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    Vec v = random_unit_vector(g, n);
    const double r = radius * std::pow(ud(g), 1.0 / n);
    for (double& x : v) x *= r;
    return v;
}

// Index-parallel loop used by the scan drivers.  Work items only touch
// their own slot, so aggregation order never depends on the schedule.
inline void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || count < 2) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    const int workers = std::min(threads, count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (int i = w; i < count; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

inline int default_threads() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace reflecta
