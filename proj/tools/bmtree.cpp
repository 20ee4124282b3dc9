// bmtree: authenticated ordered key-value store with constant-size intranode
// proofs. Exit codes: 0 success/accept, 1 reject/not-found, 2 usage error,
// 3 I/O or store error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "bmt/bench.hpp"
#include "bmt/proofs.hpp"
#include "bmt/store.hpp"

using namespace bmt;

namespace {

int hex_val(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

Bytes from_hex(const std::string& s) {
    if (s.size() % 2) throw std::invalid_argument("hex string has odd length");
    Bytes out;
    out.reserve(s.size() / 2);
    for (std::size_t i = 0; i < s.size(); i += 2) {
        int hi = hex_val(s[i]), lo = hex_val(s[i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("bad hex digit");
        out.push_back((std::uint8_t)(hi * 16 + lo));
    }
    return out;
}

std::string to_hex(std::span<const std::uint8_t> b) {
    static const char* d = "0123456789abcdef";
    std::string s;
    s.reserve(b.size() * 2);
    for (auto c : b) {
        s += d[c >> 4];
        s += d[c & 15];
    }
    return s;
}

Bytes arg_bytes(const std::string& s, bool hex) {
    if (hex) return from_hex(s);
    return Bytes(s.begin(), s.end());
}

// "@file" loads bytes from a file (binary), otherwise the string is hex
Bytes blob_arg(const std::string& s) {
    if (!s.empty() && s[0] == '@') {
        std::ifstream f(s.substr(1), std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + s.substr(1));
        return Bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    }
    return from_hex(s);
}

void write_output(const std::string& path, std::span<const std::uint8_t> data) {
    if (path.empty()) {
        std::cout << to_hex(data) << "\n";
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open output file " + path);
    f.write((const char*)data.data(), (std::streamsize)data.size());
}

struct OpenedStore {
    FileStore store;
    PublicParams params;
    AuthTree tree;

    OpenedStore(const std::string& dir, const std::string& params_path)
        : store(FileStore::open(dir)),
          params(load_params(params_path)),
          tree(store, params, store.q(), store.current().first, store.current().second) {}
};

void print_record(const RootRecord& rec) {
    std::cout << "root_hash:     " << to_hex(rec.root_hash) << "\n";
    std::cout << "commitment:    " << to_hex(rec.root_commitment) << "\n";
    std::cout << "element_count: " << rec.element_count << "\n";
    std::cout << "previous:      " << to_hex(rec.previous) << "\n";
    std::cout << "record:        " << to_hex(rec.serialize()) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynamic B+ Merkle tree key-value store"};
    app.require_subcommand(1);

    std::string store_dir, params_path, output_path, root_blob, proof_blob, value_digest_hex;
    std::string key_arg, value_arg, lo_arg, hi_arg, type_arg, sweep_arg;
    bool hex = false;
    std::uint32_t q = 256;
    std::uint64_t seed = 1;
    std::size_t samples = 24;

    auto add_store = [&](CLI::App* c) {
        c->add_option("--store", store_dir, "store directory")->required();
    };
    auto add_params = [&](CLI::App* c) {
        c->add_option("--params", params_path, "public parameters file")->required();
    };

    auto* c_setup = app.add_subcommand("setup", "generate public parameters (test mode)");
    c_setup->add_option("--q", q, "branching factor")->required();
    c_setup->add_option("--params", params_path, "output params file")->required();
    c_setup->add_option("--seed", seed, "trapdoor derivation seed");

    auto* c_init = app.add_subcommand("init", "create an empty store");
    add_store(c_init);
    c_init->add_option("--q", q, "branching factor")->required();

    auto* c_insert = app.add_subcommand("insert", "insert or update a key");
    add_store(c_insert);
    add_params(c_insert);
    c_insert->add_option("key", key_arg)->required();
    c_insert->add_option("value", value_arg)->required();
    c_insert->add_flag("--hex", hex, "key/value are hex encoded");

    auto* c_get = app.add_subcommand("get", "look a key up");
    add_store(c_get);
    c_get->add_option("key", key_arg)->required();
    c_get->add_flag("--hex", hex);

    auto* c_delete = app.add_subcommand("delete", "remove a key");
    add_store(c_delete);
    add_params(c_delete);
    c_delete->add_option("key", key_arg)->required();
    c_delete->add_flag("--hex", hex);

    auto* c_range = app.add_subcommand("range", "list keys in [lo, hi]");
    add_store(c_range);
    c_range->add_option("lo", lo_arg)->required();
    c_range->add_option("hi", hi_arg)->required();
    c_range->add_flag("--hex", hex);

    auto* c_prove = app.add_subcommand("prove", "membership proof for a present key");
    add_store(c_prove);
    add_params(c_prove);
    c_prove->add_option("key", key_arg)->required();
    c_prove->add_flag("--hex", hex);
    c_prove->add_option("--output", output_path, "write binary proof here (hex to stdout otherwise)");

    auto* c_absent = app.add_subcommand("prove-absent", "non-membership proof for an absent key");
    add_store(c_absent);
    add_params(c_absent);
    c_absent->add_option("key", key_arg)->required();
    c_absent->add_flag("--hex", hex);
    c_absent->add_option("--output", output_path);

    auto* c_prange = app.add_subcommand("prove-range", "range proof for [lo, hi]");
    add_store(c_prange);
    add_params(c_prange);
    c_prange->add_option("lo", lo_arg)->required();
    c_prange->add_option("hi", hi_arg)->required();
    c_prange->add_flag("--hex", hex);
    c_prange->add_option("--output", output_path);

    auto* c_verify = app.add_subcommand("verify", "verify a proof blob against a root record");
    add_params(c_verify);
    c_verify->add_option("--root", root_blob, "root record (hex or @file)")->required();
    c_verify->add_option("--proof", proof_blob, "proof blob (hex or @file)")->required();
    c_verify->add_option("--type", type_arg, "member|absent|range")->required();
    c_verify->add_option("--key", key_arg);
    c_verify->add_option("--lo", lo_arg);
    c_verify->add_option("--hi", hi_arg);
    c_verify->add_option("--value-digest", value_digest_hex, "expected 32-byte value digest (hex)");
    c_verify->add_flag("--hex", hex);

    auto* c_root = app.add_subcommand("root", "print the current root record");
    add_store(c_root);

    auto* c_history = app.add_subcommand("history", "print the root history chain");
    add_store(c_history);

    auto* c_bench = app.add_subcommand("bench", "proof size benchmark (CSV)");
    c_bench->add_option("--q", q, "branching factor");
    c_bench->add_option("--params", params_path, "params file (test-mode params generated if absent)");
    c_bench->add_option("--sweep", sweep_arg, "comma separated n values");
    c_bench->add_option("--samples", samples, "proofs sampled per n");
    c_bench->add_option("--seed", seed, "rng seed");
    c_bench->add_option("--output", output_path, "CSV file (stdout otherwise)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*c_setup) {
            validate_branching(q);
            PublicParams pp = setup_test(q, seed);
            save_params(pp, params_path);
            std::cerr << "warning: test-mode setup; the trapdoor is derivable from the seed\n";
            std::cout << "wrote params for t=" << pp.t << " (" << pp.g1_powers.size()
                      << " commitment powers) to " << params_path << "\n";
            return 0;
        }
        if (*c_init) {
            FileStore::create(store_dir, q);
            std::cout << "created store at " << store_dir << " (q=" << q << ")\n";
            return 0;
        }
        if (*c_insert) {
            OpenedStore s(store_dir, params_path);
            Bytes value = arg_bytes(value_arg, hex);
            ValueLogEntry e = s.store.put_value(value);
            std::vector<UpdateOp> ops = {
                UpdateOp::insert(arg_bytes(key_arg, hex), e.digest, e.offset, e.length)};
            auto res = s.tree.apply_updates(ops);
            s.store.publish(res.record, s.tree.root_id());
            std::cout << to_hex(res.record.root_hash) << "\n";
            return 0;
        }
        if (*c_get) {
            FileStore store = FileStore::open(store_dir);
            auto [rec, root_id] = store.current();
            StoreView view(store);
            SearchResult r = tree_search(view, root_id, arg_bytes(key_arg, hex));
            if (!r.found) {
                std::cerr << "not found\n";
                return 1;
            }
            ValueLogEntry e{r.elem->voff, r.elem->vlen, r.elem->vdigest};
            Bytes v = store.get_value(e);
            if (hex) std::cout << to_hex(v) << "\n";
            else std::cout.write((const char*)v.data(), (std::streamsize)v.size()) << "\n";
            return 0;
        }
        if (*c_delete) {
            OpenedStore s(store_dir, params_path);
            std::vector<UpdateOp> ops = {UpdateOp::remove(arg_bytes(key_arg, hex))};
            auto res = s.tree.apply_updates(ops);
            if (!res.published) {
                std::cerr << "key absent, store unchanged\n";
                return 1;
            }
            s.store.publish(res.record, s.tree.root_id());
            std::cout << to_hex(res.record.root_hash) << "\n";
            return 0;
        }
        if (*c_range) {
            FileStore store = FileStore::open(store_dir);
            auto [rec, root_id] = store.current();
            StoreView view(store);
            auto elems = tree_range_scan(view, root_id, arg_bytes(lo_arg, hex), arg_bytes(hi_arg, hex));
            for (const auto& e : elems)
                std::cout << to_hex(e.key) << " " << to_hex(e.vdigest) << "\n";
            return 0;
        }
        if (*c_prove) {
            OpenedStore s(store_dir, params_path);
            MembershipProof p = prove_membership(s.tree, arg_bytes(key_arg, hex));
            write_output(output_path, serialize_proof(p));
            return 0;
        }
        if (*c_absent) {
            OpenedStore s(store_dir, params_path);
            NonMembershipProof p = prove_nonmembership(s.tree, arg_bytes(key_arg, hex));
            write_output(output_path, serialize_proof(p));
            return 0;
        }
        if (*c_prange) {
            OpenedStore s(store_dir, params_path);
            RangeProof p = prove_range(s.tree, arg_bytes(lo_arg, hex), arg_bytes(hi_arg, hex));
            write_output(output_path, serialize_proof(p));
            return 0;
        }
        if (*c_verify) {
            PublicParams pp = load_params(params_path);
            RootRecord rec = RootRecord::deserialize(blob_arg(root_blob));
            Bytes blob = blob_arg(proof_blob);
            if (type_arg != "member" && type_arg != "absent" && type_arg != "range")
                throw std::invalid_argument("unknown --type (member|absent|range)");
            ProofType blob_type = peek_proof_type(blob);
            auto want = type_arg == "member"   ? ProofType::membership
                        : type_arg == "absent" ? ProofType::nonmembership
                                               : ProofType::range;
            if (blob_type != want) {
                std::cout << "reject\n";
                std::cerr << "proof blob type does not match --type\n";
                return 1;
            }
            if (type_arg == "member") {
                if (key_arg.empty()) throw std::invalid_argument("--key required for member");
                MembershipProof p = parse_membership(blob);
                Digest vd{};
                if (!value_digest_hex.empty()) {
                    Bytes d = from_hex(value_digest_hex);
                    if (d.size() != 32) throw std::invalid_argument("--value-digest must be 32 bytes");
                    std::copy(d.begin(), d.end(), vd.begin());
                } else if (!p.levels.empty() && !p.levels.back().opened.empty()) {
                    vd = p.levels.back().opened[0].digest;
                }
                bool ok = verify_membership(pp, rec, arg_bytes(key_arg, hex), vd, p);
                std::cout << (ok ? "accept" : "reject") << "\n";
                if (ok) std::cout << "value_digest: " << to_hex(vd) << "\n";
                return ok ? 0 : 1;
            }
            if (type_arg == "absent") {
                if (key_arg.empty()) throw std::invalid_argument("--key required for absent");
                NonMembershipProof p = parse_nonmembership(blob);
                bool ok = verify_nonmembership(pp, rec, arg_bytes(key_arg, hex), p);
                std::cout << (ok ? "accept" : "reject") << "\n";
                return ok ? 0 : 1;
            }
            if (type_arg == "range") {
                if (lo_arg.empty() || hi_arg.empty())
                    throw std::invalid_argument("--lo and --hi required for range");
                RangeProof p = parse_range(blob);
                auto res = verify_range(pp, rec, arg_bytes(lo_arg, hex), arg_bytes(hi_arg, hex), p);
                std::cout << (res.ok ? "accept" : "reject") << "\n";
                if (res.ok)
                    for (const auto& [k, d] : res.interior)
                        std::cout << to_hex(k) << " " << to_hex(d) << "\n";
                return res.ok ? 0 : 1;
            }
            throw std::invalid_argument("unknown --type (member|absent|range)");
        }
        if (*c_root) {
            FileStore store = FileStore::open(store_dir);
            print_record(store.current().first);
            return 0;
        }
        if (*c_history) {
            FileStore store = FileStore::open(store_dir);
            const auto& rs = store.roots();
            for (std::size_t i = 0; i < rs.size(); ++i) {
                const auto& rec = rs[i].first;
                std::cout << i << " root=" << to_hex(rec.root_hash)
                          << " count=" << rec.element_count
                          << " prev=" << to_hex(rec.previous) << "\n";
            }
            return 0;
        }
        if (*c_bench) {
            BenchConfig cfg;
            cfg.q = q;
            cfg.samples = samples;
            cfg.seed = seed;
            if (!sweep_arg.empty()) {
                cfg.sweep.clear();
                std::size_t at = 0;
                while (at < sweep_arg.size()) {
                    std::size_t comma = sweep_arg.find(',', at);
                    if (comma == std::string::npos) comma = sweep_arg.size();
                    cfg.sweep.push_back(std::stoull(sweep_arg.substr(at, comma - at)));
                    at = comma + 1;
                }
            }
            PublicParams pp;
            if (!params_path.empty()) pp = load_params(params_path);
            else {
                std::cerr << "warning: using test-mode params (seed " << seed << ")\n";
                pp = setup_test(cfg.q, seed);
            }
            auto rows = run_bench(pp, cfg);
            if (output_path.empty()) write_bench_csv(std::cout, rows);
            else {
                std::ofstream f(output_path, std::ios::trunc);
                if (!f) throw std::runtime_error("cannot open " + output_path);
                write_bench_csv(f, rows);
            }
            return 0;
        }
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
