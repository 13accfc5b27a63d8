// End-to-end checks of the command-line tool: spawns the real binary.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "ringvec/model.hpp"
#include "ringvec/rng.hpp"

namespace {

std::string g_cli_path;

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

CommandResult run_command(const std::string& args) {
    std::string cmd = g_cli_path + " " + args + " > cli_test_stdout.txt 2> cli_test_stderr.txt";
    int status = std::system(cmd.c_str());
    CommandResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in("cli_test_stdout.txt");
    std::ostringstream buf;
    buf << in.rdbuf();
    result.output = buf.str();
    return result;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_zipf_corpus(const std::string& path, int sentences, int words_per_sentence,
                       uint64_t seed) {
    ringvec::Rng rng(seed);
    std::ofstream out(path);
    for (int s = 0; s < sentences; ++s) {
        for (int w = 0; w < words_per_sentence; ++w) {
            // crude Zipf-ish shape over ~60 types
            uint64_t r = rng.next_below(1000);
            uint64_t id = r < 400 ? rng.next_below(5)
                        : r < 750 ? 5 + rng.next_below(15)
                                  : 20 + rng.next_below(40);
            out << 'w' << id << (w + 1 == words_per_sentence ? "" : " ");
        }
        out << '\n';
    }
}

struct Cleanup {
    std::vector<std::string> paths;
    ~Cleanup() {
        for (const auto& p : paths) std::remove(p.c_str());
        std::remove("cli_test_stdout.txt");
        std::remove("cli_test_stderr.txt");
    }
};

} // namespace

TEST_CASE("train writes embeddings, vocabulary and report") {
    Cleanup cleanup;
    cleanup.paths = {"cli_corpus.txt", "cli_vec.txt", "cli_vocab.tsv", "cli_report.json"};
    write_zipf_corpus("cli_corpus.txt", 60, 18, 7);

    CommandResult r = run_command(
        "train cli_corpus.txt --epochs 2 --dim 16 --window 5 --negatives 3 "
        "--min-count 1 --subsample 0 --workers 1 --seed 7 --table-size 10_000 "
        "--out cli_vec.txt --save-vocab cli_vocab.tsv --report cli_report.json");
    REQUIRE(r.exit_code == 0);

    ringvec::LoadedEmbeddings emb = ringvec::load_embeddings("cli_vec.txt");
    CHECK(emb.dim == 16);
    CHECK(emb.count > 0);

    std::string vocab = read_file("cli_vocab.tsv");
    CHECK(vocab.find('\t') != std::string::npos);

    std::string report = read_file("cli_report.json");
    CHECK(report.find("\"batching_words_per_sec\"") != std::string::npos);
    CHECK(report.find("\"ring_hits\"") != std::string::npos);
}

TEST_CASE("deterministic byte-identical output for workers=1 and a fixed seed") {
    Cleanup cleanup;
    cleanup.paths = {"cli_corpus2.txt", "cli_vec_a.txt", "cli_vec_b.txt"};
    write_zipf_corpus("cli_corpus2.txt", 50, 15, 21);

    const std::string flags =
        " --epochs 2 --dim 12 --min-count 1 --workers 1 --seed 42 --table-size 5_000";
    CommandResult a =
        run_command("train cli_corpus2.txt" + flags + " --out cli_vec_a.txt");
    CommandResult b =
        run_command("train cli_corpus2.txt" + flags + " --out cli_vec_b.txt");
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    CHECK(read_file("cli_vec_a.txt") == read_file("cli_vec_b.txt"));
    CHECK(!read_file("cli_vec_a.txt").empty());
}

TEST_CASE("eval-sim prints rho, used and skipped") {
    Cleanup cleanup;
    cleanup.paths = {"cli_emb.txt", "cli_bench.tsv"};
    {
        std::ofstream out("cli_emb.txt");
        out << "4 2\n";
        out << "sun 1.0 0.0\n";
        out << "star 0.9 0.1\n";
        out << "rock 0.0 1.0\n";
        out << "stone 0.1 0.9\n";
    }
    {
        std::ofstream out("cli_bench.tsv");
        out << "sun\tstar\t9.0\n";
        out << "rock\tstone\t8.0\n";
        out << "sun\trock\t1.0\n";
        out << "star\tstone\t2.0\n";
        out << "sun\tmoon\t5.0\n";
    }
    CommandResult r = run_command("eval-sim cli_emb.txt cli_bench.tsv");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("rho=") == 0);
    CHECK(r.output.find("used=4") != std::string::npos);
    CHECK(r.output.find("skipped=1") != std::string::npos);
}

TEST_CASE("eval-analogy solves the exact-offset construction") {
    Cleanup cleanup;
    cleanup.paths = {"cli_emb2.txt", "cli_quads.txt"};
    {
        std::ofstream out("cli_emb2.txt");
        out << "6 4\n";
        out << "a 1.0 0.0 0.0 0.0\n";
        out << "astar 0.0 1.0 0.0 0.0\n";
        out << "b 1.0 0.0 1.0 0.0\n";
        out << "bstar 0.0 1.0 1.0 0.0\n";
        out << "far1 -1.0 -1.0 -1.0 0.5\n";
        out << "far2 -0.5 -0.5 0.0 -1.0\n";
    }
    {
        std::ofstream out("cli_quads.txt");
        out << ": section\n";
        out << "a astar b bstar\n";
    }
    CommandResult add = run_command("eval-analogy cli_emb2.txt cli_quads.txt --method add");
    REQUIRE(add.exit_code == 0);
    CHECK(add.output.find("accuracy=1.000000") == 0);
    CommandResult mul = run_command("eval-analogy cli_emb2.txt cli_quads.txt --method mul");
    REQUIRE(mul.exit_code == 0);
    CHECK(mul.output.find("accuracy=1.000000") == 0);
}

TEST_CASE("nn surfaces a planted duplicate as the first neighbor") {
    Cleanup cleanup;
    cleanup.paths = {"cli_emb3.txt"};
    {
        std::ofstream out("cli_emb3.txt");
        out << "3 2\n";
        out << "king 0.5 0.5\n";
        out << "roi 1.0 1.0\n";
        out << "rock -0.4 0.9\n";
    }
    CommandResult r = run_command("nn cli_emb3.txt king -k 2");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("roi 1.000000") == 0);
}

TEST_CASE("traffic prints the comparison table with zero per-sentence deviation") {
    Cleanup cleanup;
    cleanup.paths = {"cli_corpus3.txt"};
    write_zipf_corpus("cli_corpus3.txt", 40, 12, 3);
    CommandResult r = run_command(
        "traffic cli_corpus3.txt --min-count 1 --subsample 0 --workers 2 "
        "--table-size 5_000 --reuse lifetime");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("context_reads") != std::string::npos);
    CHECK(r.output.find("instrumented vs per-sentence analytic") != std::string::npos);
    CHECK(r.output.find("0.857143") != std::string::npos); // Wf=3 statistic
}

TEST_CASE("config file values are applied and flags override them") {
    Cleanup cleanup;
    cleanup.paths = {"cli_corpus4.txt", "cli_cfg.conf", "cli_vec4.txt", "cli_report4.json"};
    write_zipf_corpus("cli_corpus4.txt", 30, 10, 11);
    {
        std::ofstream out("cli_cfg.conf");
        out << "dim = 8\nepochs = 1\nmin_count = 1\nworkers = 1\ntable_size = 2000\n";
    }
    CommandResult r = run_command(
        "train cli_corpus4.txt --config cli_cfg.conf --dim 10 --out cli_vec4.txt "
        "--report cli_report4.json");
    REQUIRE(r.exit_code == 0);
    ringvec::LoadedEmbeddings emb = ringvec::load_embeddings("cli_vec4.txt");
    CHECK(emb.dim == 10); // flag wins over config file
}

TEST_CASE("unknown flags and subcommands exit 2 with usage text") {
    CommandResult r = run_command("frobnicate");
    CHECK(r.exit_code == 2);
    CommandResult r2 = run_command("train");
    CHECK(r2.exit_code == 2);
}

TEST_CASE("runtime errors exit 1 with a one-line diagnostic") {
    CommandResult r = run_command("eval-sim missing_embeddings.txt missing_bench.tsv");
    CHECK(r.exit_code == 1);
    CommandResult r2 = run_command("train no_such_corpus.txt --out x.txt");
    CHECK(r2.exit_code == 1);
}

int main(int argc, char** argv) {
    doctest::Context context;
    // Last argument (from ctest) is the CLI binary path.
    if (argc > 1 && argv[argc - 1][0] != '-') {
        g_cli_path = argv[argc - 1];
        --argc;
    }
    if (g_cli_path.empty()) {
        std::fprintf(stderr, "usage: test_cli <path-to-ringvec-binary>\n");
        return 1;
    }
    context.applyCommandLine(argc, argv);
    return context.run();
}
