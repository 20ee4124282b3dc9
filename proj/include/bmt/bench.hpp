#pragma once

#include <iosfwd>

#include "bmt/proofs.hpp"

namespace bmt {

// Proof-size benchmark: builds a tree per n, measures serialized membership
// and non-membership proof sizes and generation/verification times, and
// emits the comparison models alongside.
struct BenchRow {
    std::uint64_t n = 0;
    std::size_t levels = 0;
    std::size_t mem_bytes_max = 0;
    std::size_t mem_bytes_mean = 0;
    std::size_t nonmem_bytes_mean = 0;
    double gen_us = 0;
    double verify_us = 0;
    bool extrapolated = false;
    double iavl_model = 0;
    double bplus_model = 0;
    double rsa_model = 0;
    double qary_model = 0;
};

struct BenchConfig {
    std::uint32_t q = 256;
    std::vector<std::uint64_t> sweep = {1000, 10000, 100000, 1000000};
    std::vector<std::uint64_t> extrapolate = {1000000000};
    std::size_t samples = 24;
    std::uint64_t seed = 1;
    std::size_t key_bytes = 32;
};

std::vector<BenchRow> run_bench(const PublicParams& pp, const BenchConfig& cfg);

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

double iavl_model_bytes(double n);
double bplus_model_bytes(double n);

}  // namespace bmt
