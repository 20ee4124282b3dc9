// Drives the bmtree binary end to end; argv[1] is the binary path.
// The verifier runs in a separate process with only the params file, the
// root record blob, the proof blob, and the query.

#include <cstdio>
#include <unistd.h>
#include <sys/wait.h>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string g_bin;
fs::path g_dir;
int g_failures = 0;

void expect(bool cond, const std::string& what) {
    if (cond) {
        std::printf("ok   %s\n", what.c_str());
    } else {
        std::printf("FAIL %s\n", what.c_str());
        ++g_failures;
    }
}

int run(const std::string& args, std::string* out = nullptr) {
    std::string cmd = g_bin + " " + args + " 2>/dev/null";
    FILE* p = ::popen(cmd.c_str(), "r");
    if (!p) return -1;
    std::string captured;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) captured.append(buf, n);
    int status = ::pclose(p);
    if (out) *out = captured;
    return WEXITSTATUS(status);
}

std::string file_bytes(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

std::string first_line(const std::string& s) {
    auto nl = s.find('\n');
    return nl == std::string::npos ? s : s.substr(0, nl);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_cli <bmtree binary>\n");
        return 2;
    }
    g_bin = argv[1];
    g_dir = fs::temp_directory_path() / ("bmt_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(g_dir);
    fs::create_directories(g_dir);
    auto at = [&](const std::string& name) { return (g_dir / name).string(); };

    // setup is deterministic in the seed and rejects invalid q
    expect(run("setup --q 8 --seed 3 --params " + at("p1.bin")) == 0, "setup q=8");
    expect(run("setup --q 8 --seed 3 --params " + at("p2.bin")) == 0, "setup again");
    expect(file_bytes(at("p1.bin")) == file_bytes(at("p2.bin")), "setup determinism");
    expect(run("setup --q 2 --params " + at("bad.bin")) == 2, "setup q=2 rejected");
    expect(run("setup --q 7 --params " + at("bad.bin")) == 2, "setup odd q rejected");

    std::string params = at("p1.bin");
    std::string store = at("db");
    expect(run("init --store " + store + " --q 8") == 0, "init store");

    // data operations
    expect(run("insert --store " + store + " --params " + params + " alpha one") == 0, "insert alpha");
    expect(run("insert --store " + store + " --params " + params + " beta two") == 0, "insert beta");
    expect(run("insert --store " + store + " --params " + params + " gamma three") == 0,
           "insert gamma");
    std::string got;
    expect(run("get --store " + store + " beta", &got) == 0 && first_line(got) == "two", "get beta");
    expect(run("get --store " + store + " missing") == 1, "get missing -> exit 1");

    std::string rootout;
    expect(run("root --store " + store, &rootout) == 0, "root");
    std::string record;
    {
        std::istringstream is(rootout);
        std::string line;
        while (std::getline(is, line))
            if (line.rfind("record:", 0) == 0) record = line.substr(line.find_last_of(' ') + 1);
    }
    expect(record.size() == 240, "root record blob is 120 bytes");

    // proofs as portable blobs, verified by a separate process
    expect(run("prove --store " + store + " --params " + params + " beta --output " + at("m.bin")) == 0,
           "prove member");
    expect(run("verify --params " + params + " --root " + record + " --proof @" + at("m.bin") +
               " --type member --key beta") == 0,
           "verify member accept");
    expect(run("verify --params " + params + " --root " + record + " --proof @" + at("m.bin") +
               " --type member --key alpha") == 1,
           "verify member wrong key -> 1");

    // tampered blob rejected
    {
        std::string blob = file_bytes(at("m.bin"));
        blob[blob.size() / 2] ^= 0x20;
        std::ofstream f(at("m_bad.bin"), std::ios::binary);
        f << blob;
    }
    expect(run("verify --params " + params + " --root " + record + " --proof @" + at("m_bad.bin") +
               " --type member --key beta") == 1,
           "verify tampered member -> 1");

    expect(run("prove-absent --store " + store + " --params " + params + " delta --output " +
               at("a.bin")) == 0,
           "prove absent");
    expect(run("verify --params " + params + " --root " + record + " --proof @" + at("a.bin") +
               " --type absent --key delta") == 0,
           "verify absent accept");
    expect(run("verify --params " + params + " --root " + record + " --proof @" + at("a.bin") +
               " --type absent --key beta") == 1,
           "verify absent wrong key -> 1");

    expect(run("prove-range --store " + store + " --params " + params + " a z --output " +
               at("r.bin")) == 0,
           "prove range");
    std::string range_out;
    expect(run("verify --params " + params + " --root " + record + " --proof @" + at("r.bin") +
               " --type range --lo a --hi z", &range_out) == 0,
           "verify range accept");
    expect(first_line(range_out) == "accept" && range_out.find('\n') != std::string::npos,
           "range verification echoes the interior");

    // delete and root history
    expect(run("delete --store " + store + " --params " + params + " alpha") == 0, "delete alpha");
    expect(run("delete --store " + store + " --params " + params + " alpha") == 1,
           "delete absent -> 1");
    expect(run("get --store " + store + " alpha") == 1, "get deleted -> 1");
    std::string hist;
    expect(run("history --store " + store, &hist) == 0, "history");
    int lines = 0;
    for (char c : hist)
        if (c == '\n') ++lines;
    expect(lines == 5, "history: genesis + 4 published roots");

    // the old record still verifies the old proof after new writes
    expect(run("verify --params " + params + " --root " + record + " --proof @" + at("m.bin") +
               " --type member --key beta") == 0,
           "old root still verifies old proof");

    // usage errors
    expect(run("verify --params " + params + " --root " + record + " --proof @" + at("m.bin") +
               " --type bogus --key beta") == 2,
           "unknown verify type -> 2");
    expect(run("bogus-subcommand") == 2, "unknown subcommand -> 2");
    expect(run("get --store " + at("nosuch") + " k") == 3, "missing store -> 3");

    // hex escape for binary keys and values
    expect(run("insert --store " + store + " --params " + params + " --hex 00ff 11dd") == 0,
           "insert hex key");
    std::string hexval;
    expect(run("get --store " + store + " --hex 00ff", &hexval) == 0 &&
               first_line(hexval) == "11dd",
           "get hex key");

    // a small bench run emits the CSV contract
    std::string csv;
    expect(run("bench --q 16 --sweep 64,256 --samples 4 --output " + at("bench.csv")) == 0,
           "bench runs");
    csv = file_bytes(at("bench.csv"));
    expect(csv.rfind("n,levels,membership_bytes_max", 0) == 0, "bench csv header");
    int csv_lines = 0;
    for (char c : csv)
        if (c == '\n') ++csv_lines;
    expect(csv_lines == 4, "bench csv rows (2 measured + 1 extrapolated + header)");

    fs::remove_all(g_dir);
    if (g_failures) {
        std::printf("%d CLI checks failed\n", g_failures);
        return 1;
    }
    std::printf("all CLI checks passed\n");
    return 0;
}
