#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace opdmin {

// Deterministic random stream. The engine state is fully specified by the
// standard; the value transforms below are hand-written so that sequences are
// identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller. Consumes two uniforms per draw and keeps
    // no cached state, so interleaved calls replay exactly.
    double normal() {
        double u1 = (static_cast<double>(eng_() >> 11) + 1.0) * 0x1p-53;  // (0, 1]
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Uniform integer in [lo, hi], inclusive. Rejection sampling keeps the
    // distribution exact and the stream reproducible.
    std::uint64_t uniform_index(std::uint64_t range) {
        // returns value in [0, range)
        if (range == 0) return 0;
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % range;
    }

    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(uniform_index(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 eng_;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}
}  // namespace detail

// Derives an independent sub-stream seed from a master seed, a label, and up
// to two indices. Used to decouple graph, opinion, arm, noise, and algorithm
// randomness so sweeps can vary one factor at a time.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                                 std::uint64_t index0 = 0, std::uint64_t index1 = 0) {
    std::uint64_t h = detail::splitmix64(master ^ detail::fnv1a(stream));
    h = detail::splitmix64(h ^ detail::splitmix64(index0));
    h = detail::splitmix64(h ^ detail::splitmix64(index1 + 0x51ed270b7a1fca5dULL));
    return h;
}

}  // namespace opdmin
