#include "bmt/algebra.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace bmt {

Digest sha256(std::span<const std::uint8_t> data) {
    Digest out{};
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) ||
        len != out.size())
        throw std::runtime_error("sha256 failed");
    return out;
}

Fr hash_to_scalar(std::span<const std::uint8_t> data) {
    Digest d = sha256(data);
    return Fr::from_bytes_be_reduce(d);
}

G1 multi_scalar_mul(std::span<const G1Affine> bases, std::span<const Fr> scalars) {
    if (bases.empty()) throw std::invalid_argument("multi_scalar_mul: empty input");
    return msm<G1Traits>(bases, scalars);
}

G2 multi_scalar_mul(std::span<const G2Affine> bases, std::span<const Fr> scalars) {
    if (bases.empty()) throw std::invalid_argument("multi_scalar_mul: empty input");
    return msm<G2Traits>(bases, scalars);
}

}  // namespace bmt
