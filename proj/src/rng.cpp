#include "softgraph/rng.hpp"

namespace softgraph {

std::vector<std::size_t> sample_without_replacement(SplitMix64& rng, std::size_t n,
                                                    std::size_t k) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    if (k > n) k = n;
    for (std::size_t i = 0; i < k; i++) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

}  // namespace softgraph
