#include "bmt/bench.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <random>

namespace bmt {

double iavl_model_bytes(double n) { return std::log2(n) * 34.0; }
double bplus_model_bytes(double n) { return std::log10(n) / std::log10(200.0) * 96.0; }

namespace {

Key random_key(std::mt19937_64& rng, std::size_t len) {
    Key k(len);
    for (auto& b : k) b = (std::uint8_t)rng();
    return k;
}

}  // namespace

std::vector<BenchRow> run_bench(const PublicParams& pp, const BenchConfig& cfg) {
    using clock = std::chrono::steady_clock;
    std::vector<BenchRow> rows;
    double per_level_bytes = 0;

    for (std::uint64_t n : cfg.sweep) {
        std::mt19937_64 rng(cfg.seed * 1000003 + n);
        MemNodeStore store;
        AuthTree tree(store, pp, cfg.q);

        std::vector<UpdateOp> batch;
        batch.reserve(n);
        std::vector<Key> keys;
        keys.reserve(n);
        while (keys.size() < n) {
            Key k = random_key(rng, cfg.key_bytes);
            Digest d = sha256(k);
            keys.push_back(k);
            batch.push_back(UpdateOp::insert(std::move(k), d));
        }
        tree.apply_updates(batch);
        batch.clear();
        batch.shrink_to_fit();

        BenchRow row;
        row.n = n;
        row.levels = tree.height() + 1;

        std::size_t total = 0, worst = 0;
        double gen_total = 0, verify_total = 0;
        const RootRecord rec = tree.record();
        for (std::size_t i = 0; i < cfg.samples; ++i) {
            const Key& k = keys[rng() % keys.size()];
            auto t0 = clock::now();
            MembershipProof mp = prove_membership(tree, k);
            auto t1 = clock::now();
            Bytes blob = serialize_proof(mp);
            Digest vd = sha256(k);
            bool ok = verify_membership(pp, rec, k, vd, mp);
            auto t2 = clock::now();
            if (!ok) throw std::logic_error("bench: honest membership proof rejected");
            gen_total += std::chrono::duration<double, std::micro>(t1 - t0).count();
            verify_total += std::chrono::duration<double, std::micro>(t2 - t1).count();
            total += blob.size();
            worst = std::max(worst, blob.size());
        }
        row.mem_bytes_mean = total / cfg.samples;
        row.mem_bytes_max = worst;
        row.gen_us = gen_total / (double)cfg.samples;
        row.verify_us = verify_total / (double)cfg.samples;

        std::size_t nm_total = 0, nm_count = 0;
        while (nm_count < cfg.samples) {
            Key k = random_key(rng, cfg.key_bytes);
            if (tree.search(k).found) continue;
            NonMembershipProof nm = prove_nonmembership(tree, k);
            if (!verify_nonmembership(pp, rec, k, nm))
                throw std::logic_error("bench: honest non-membership proof rejected");
            nm_total += serialize_proof(nm).size();
            ++nm_count;
        }
        row.nonmem_bytes_mean = nm_total / nm_count;

        row.iavl_model = iavl_model_bytes((double)n);
        row.bplus_model = bplus_model_bytes((double)n);
        row.rsa_model = 1500;
        row.qary_model = 1000;
        per_level_bytes = (double)row.mem_bytes_max / (double)row.levels;
        rows.push_back(row);
    }

    for (std::uint64_t n : cfg.extrapolate) {
        BenchRow row;
        row.n = n;
        row.levels = (std::size_t)std::ceil(std::log((double)n) / std::log((double)cfg.q));
        row.extrapolated = true;
        row.mem_bytes_mean = row.mem_bytes_max = (std::size_t)(per_level_bytes * (double)row.levels);
        row.iavl_model = iavl_model_bytes((double)n);
        row.bplus_model = bplus_model_bytes((double)n);
        row.rsa_model = 1500;
        row.qary_model = 1000;
        rows.push_back(row);
    }
    return rows;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
    os << "n,levels,membership_bytes_max,membership_bytes_mean,nonmembership_bytes_mean,"
          "gen_us,verify_us,extrapolated,iavl_model_bytes,bplus_model_bytes,rsa_model_bytes,"
          "qary_model_bytes\n";
    for (const auto& r : rows) {
        os << r.n << ',' << r.levels << ',' << r.mem_bytes_max << ',' << r.mem_bytes_mean << ','
           << r.nonmem_bytes_mean << ',' << r.gen_us << ',' << r.verify_us << ','
           << (r.extrapolated ? 1 : 0) << ',' << r.iavl_model << ',' << r.bplus_model << ','
           << r.rsa_model << ',' << r.qary_model << '\n';
    }
}

}  // namespace bmt
