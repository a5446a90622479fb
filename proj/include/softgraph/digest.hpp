#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>

namespace softgraph {

// 128-bit digest used as a canonical color / signature value.
struct Digest128 {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    auto operator<=>(const Digest128&) const = default;

    std::string hex() const;
};

// MurmurHash3 x64 128-bit variant over an arbitrary byte buffer.
Digest128 hash_bytes(const void* data, std::size_t len, std::uint64_t seed = 0);

}  // namespace softgraph
