#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "ringvec/config.hpp"
#include "ringvec/error.hpp"

using namespace ringvec;

TEST_CASE("empty config yields the full defaults") {
    TrainConfig c = parse_config("");
    CHECK(c.dim == 128);
    CHECK(c.window == 5);
    CHECK(c.context_width() == 3);
    CHECK(c.negatives == 5);
    CHECK(c.batch_sentences == 10000);
    CHECK(c.epochs == 20);
    CHECK(c.alpha0 == doctest::Approx(0.025f));
    CHECK(c.subsample == doctest::Approx(1e-4));
    CHECK(c.min_count == 5);
    CHECK(c.max_sentence_len == 1000);
    CHECK(c.reuse_mode == ReuseMode::lifetime);
    CHECK(c.table_power == doctest::Approx(0.75));
    CHECK(c.table_size == 10'000'000);
    CHECK(c.ignore_delimiters == true);
}

TEST_CASE("context width is the ceiling of half the window") {
    TrainConfig c;
    c.window = 7;
    CHECK(c.context_width() == 4);
    c.window = 5;
    CHECK(c.context_width() == 3);
    c.window = 2;
    CHECK(c.context_width() == 1);
    c.window = 10;
    CHECK(c.context_width() == 5);
}

TEST_CASE("config document parsing with comments and underscores") {
    TrainConfig c = parse_config(
        "# comment line\n"
        "dim = 64\n"
        "batch_sentences = 10_000\n"
        "window=7   # trailing comment\n"
        "\n"
        "reuse_mode = window\n"
        "ignore_delimiters = false\n");
    CHECK(c.dim == 64);
    CHECK(c.batch_sentences == 10000);
    CHECK(c.window == 7);
    CHECK(c.reuse_mode == ReuseMode::window);
    CHECK(c.ignore_delimiters == false);
}

TEST_CASE("named validation errors") {
    SUBCASE("unknown key") {
        try {
            parse_config("directions = 5\n");
            FAIL("expected unknown_key");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::unknown_key);
        }
    }
    SUBCASE("non-numeric value") {
        try {
            parse_config("dim = twelve\n");
            FAIL("expected bad_config");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::bad_config);
        }
    }
    SUBCASE("negative negatives") {
        TrainConfig c = parse_config("negatives = -1\n");
        CHECK_THROWS_AS(validate_config(c), Error);
    }
    SUBCASE("window below one") {
        TrainConfig c;
        c.window = 0;
        CHECK_THROWS_AS(validate_config(c), Error);
    }
    SUBCASE("line without equals") {
        CHECK_THROWS_AS(parse_config("dim 12\n"), Error);
    }
    SUBCASE("diagnostic reuse mode is not configurable") {
        CHECK_THROWS_AS(parse_config("reuse_mode = window_snapshot\n"), Error);
    }
}

TEST_CASE("values outside the usual hyperparameter ranges warn but run") {
    TrainConfig c;
    c.window = 12;
    c.negatives = 25;
    auto warnings = validate_config(c);
    CHECK(warnings.size() == 2);

    c.window = 5;
    c.negatives = 5;
    CHECK(validate_config(c).empty());
}

TEST_CASE("parse(write(parse(x))) == parse(x)") {
    const char* documents[] = {
        "",
        "dim = 32\nwindow = 9\nnegatives = 15\nalpha = 0.05\n",
        "subsample = 0\nseed = 987654321\nreuse_mode = none\nqueue_capacity = 7\n",
        "epochs = 0\nworkers = 3\ntable_size = 1_000\nmin_count = 2\n",
    };
    for (const char* doc : documents) {
        TrainConfig once = parse_config(doc);
        TrainConfig twice = parse_config(write_config(once));
        CHECK(once == twice);
    }
}

TEST_CASE("resolve_config fills workers and queue capacity") {
    TrainConfig c;
    c.workers = 0;
    c.queue_capacity = 0;
    TrainConfig r = resolve_config(c);
    CHECK(r.workers >= 1);
    CHECK(r.queue_capacity == 2 * static_cast<uint64_t>(r.workers));

    c.workers = 3;
    c.queue_capacity = 5;
    r = resolve_config(c);
    CHECK(r.workers == 3);
    CHECK(r.queue_capacity == 5);
}

TEST_CASE("report write/read round-trip") {
    RunReport report;
    report.config = parse_config("dim = 16\nworkers = 2\nseed = 31\n");
    report.config = resolve_config(report.config);
    report.epochs.push_back({0, 1000, 2.0, 500.0});
    report.epochs.push_back({1, 1000, 1.6, 625.0});
    report.batching_words_per_sec = 123456.5;
    report.traffic.context_reads = 11;
    report.traffic.context_writes = 11;
    report.traffic.sample_reads = 60;
    report.traffic.sample_writes = 60;
    report.traffic.ring_hits = 240;
    report.analytic = report.traffic;
    report.words_trained = 2000;
    report.sentences_trained = 4;
    report.vocab_size = 9;
    report.wall_seconds = 3.75;

    const std::string path = "report_roundtrip_test.json";
    write_report(report, path);
    RunReport loaded = read_report(path);
    std::remove(path.c_str());

    CHECK(loaded.config == report.config);
    REQUIRE(loaded.epochs.size() == 2);
    CHECK(loaded.epochs[1].words == 1000);
    CHECK(loaded.epochs[1].seconds == doctest::Approx(1.6));
    CHECK(loaded.epochs[1].words_per_sec == doctest::Approx(625.0));
    CHECK(loaded.batching_words_per_sec == doctest::Approx(report.batching_words_per_sec));
    CHECK(loaded.traffic == report.traffic);
    CHECK(loaded.analytic == report.analytic);
    CHECK(loaded.words_trained == 2000);
    CHECK(loaded.sentences_trained == 4);
    CHECK(loaded.vocab_size == 9);
    CHECK(loaded.wall_seconds == doctest::Approx(3.75));

    // words/s equals words / seconds within rounding.
    for (const auto& e : loaded.epochs) {
        CHECK(e.words_per_sec ==
              doctest::Approx(static_cast<double>(e.words) / e.seconds).epsilon(1e-9));
    }
}

TEST_CASE("underscored numerics parse anywhere numbers do") {
    CHECK(parse_int("1_000") == 1000);
    CHECK(parse_uint("10_000_000") == 10'000'000);
    CHECK(parse_real("0.02_5") == doctest::Approx(0.025));
    CHECK_THROWS_AS(parse_int("12x"), Error);
    CHECK_THROWS_AS(parse_uint("-3"), Error);
}
