#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace explorler {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Counter-based substream derivation: (master, stream name, counter) -> seed.
// Adding a new named stream never perturbs draws in existing streams.
inline uint64_t derive_seed(uint64_t master, std::string_view stream, uint64_t counter = 0) {
    return splitmix64(splitmix64(master ^ fnv1a64(stream)) + counter);
}

// Deterministic RNG with explicit uniform/normal implementations so results
// do not depend on standard-library distribution internals.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // [0, 1)
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // [0, n)
    int uniform_int(int n) {
        const uint64_t un = static_cast<uint64_t>(n);
        const uint64_t limit = UINT64_MAX - UINT64_MAX % un;
        uint64_t r;
        do {
            r = gen_();
        } while (r >= limit);
        return static_cast<int>(r % un);
    }

    // Box-Muller with cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        const double u2 = uniform();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        spare_ = mag * std::sin(2.0 * kPi * u2);
        has_spare_ = true;
        return mag * std::cos(2.0 * kPi * u2);
    }

    double normal(double mean, double std) { return mean + std * normal(); }

    // Fisher-Yates; self-contained so shuffles are reproducible everywhere.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
            const int j = uniform_int(i + 1);
            std::swap(v[static_cast<size_t>(i)], v[static_cast<size_t>(j)]);
        }
    }

private:
    static constexpr double kPi = 3.14159265358979323846;
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

inline std::vector<double> random_unit_vector(size_t dim, Rng& rng) {
    std::vector<double> u(dim);
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (double& v : u) {
            v = rng.normal();
            n2 += v * v;
        }
    } while (std::sqrt(n2) < 1e-12);
    const double inv = 1.0 / std::sqrt(n2);
    for (double& v : u) v *= inv;
    return u;
}

}  // namespace explorler
