#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace scruple {

// Deterministic random source. mt19937_64's raw stream is pinned by the
// standard, and all distributions here are hand-rolled on top of it, so
// sequences are identical across platforms and standard-library versions
// (std::*_distribution makes no such guarantee).
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0, n). n must be > 0.
    size_t next_index(size_t n) {
        // rejection sampling to avoid modulo bias
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return static_cast<size_t>(x % n);
    }

    double next_gaussian() {
        // Box-Muller; one value per call keeps the state trivially simple
        double u1 = next_double();
        double u2 = next_double();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = next_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct indices from [0, n), in random order.
    std::vector<size_t> sample_indices(size_t n, size_t k) {
        std::vector<size_t> idx(n);
        for (size_t i = 0; i < n; ++i) idx[i] = i;
        shuffle(idx);
        if (k < n) idx.resize(k);
        return idx;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace scruple
