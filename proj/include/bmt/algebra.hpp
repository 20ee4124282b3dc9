#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "bmt/pairing.hpp"

namespace bmt {

using Bytes = std::vector<std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

// The one hash used everywhere: node hashes, value digests, k' derivation.
Digest sha256(std::span<const std::uint8_t> data);

// Digest interpreted as a big-endian integer, reduced mod r.
Fr hash_to_scalar(std::span<const std::uint8_t> data);

// prod bases[i]^scalars[i]; lengths must match and be >= 1.
G1 multi_scalar_mul(std::span<const G1Affine> bases, std::span<const Fr> scalars);
G2 multi_scalar_mul(std::span<const G2Affine> bases, std::span<const Fr> scalars);

inline std::span<const std::uint8_t> as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace bmt
