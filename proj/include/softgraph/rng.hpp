#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace softgraph {

// SplitMix64 (Steele, Lea, Flood 2014). Counter-based: the state advances by a
// fixed Weyl increment and the output is a bijective finalizer of the counter,
// so independent streams are derived by hashing, not by jumping.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform double in the open interval (0, 1): w = 1 - u with u in [0, 1),
    // rejecting the single u = 0 outcome that would give w = 1.
    double uniform_open01() {
        for (;;) {
            double w = 1.0 - uniform();
            if (w < 1.0) return w;
        }
    }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = -n % n;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

private:
    std::uint64_t state_;
};

// One SplitMix64 finalization round mixing a stream key into a seed.
inline std::uint64_t mix_u64(std::uint64_t seed, std::uint64_t key) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (key + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic per-(epoch, graph) stream key: results do not depend on the
// order in which graphs are processed or on the thread schedule.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t epoch,
                                   std::uint64_t graph_index) {
    return mix_u64(mix_u64(seed, epoch), graph_index);
}

// First k indices of a partial Fisher-Yates shuffle over {0..n-1}: a uniform
// sample without replacement, in draw order.
std::vector<std::size_t> sample_without_replacement(SplitMix64& rng, std::size_t n,
                                                    std::size_t k);

}  // namespace softgraph
