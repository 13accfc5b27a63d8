#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>

#include "ringvec/error.hpp"
#include "ringvec/model.hpp"

using namespace ringvec;

namespace {

Vocabulary make_vocab(const std::vector<std::pair<std::string, uint64_t>>& items) {
    std::unordered_map<std::string, uint64_t> counts;
    for (const auto& [token, count] : items) counts[token] = count;
    return Vocabulary::build(counts, 1);
}

struct TempFile {
    std::string path;
    explicit TempFile(std::string p) : path(std::move(p)) {}
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("init_model zeroes the output matrix and bounds the input matrix") {
    EmbeddingModel m = init_model(13, 8, 3);
    for (float x : m.output) CHECK(x == 0.0f);
    float bound = 0.5f / 8.0f;
    for (float x : m.input) {
        CHECK(x >= -bound);
        CHECK(x <= bound);
    }
}

TEST_CASE("init_model is bitwise deterministic per seed") {
    EmbeddingModel a = init_model(20, 16, 77);
    EmbeddingModel b = init_model(20, 16, 77);
    EmbeddingModel c = init_model(20, 16, 78);
    CHECK(a.input == b.input);
    CHECK(a.input != c.input);
}

TEST_CASE("init_model rejects degenerate shapes") {
    CHECK_THROWS_AS(init_model(0, 8, 1), Error);
    CHECK_THROWS_AS(init_model(8, 0, 1), Error);
}

TEST_CASE("sigmoid values") {
    CHECK(sigmoid(0.0f) == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(sigmoid(6.0f) == doctest::Approx(0.997527376843365).epsilon(1e-6));
    // Clamped: sigma(-100) evaluates at -6.
    CHECK(sigmoid(-100.0f) == doctest::Approx(0.00247262315663).epsilon(1e-6));
    CHECK(sigmoid(-100.0f) == sigmoid(-6.0f));
    CHECK(sigmoid(1000.0f) == sigmoid(6.0f));
}

TEST_CASE("sigmoid is monotone and symmetric inside the clamp range") {
    float prev = -1.0f;
    for (float x = -6.0f; x <= 6.0f; x += 0.125f) {
        float s = sigmoid(x);
        CHECK(s > prev);
        CHECK(s > 0.0f);
        CHECK(s < 1.0f);
        CHECK(static_cast<double>(s) + sigmoid(-x) == doctest::Approx(1.0).epsilon(1e-6));
        prev = s;
    }
}

TEST_CASE("lr_at follows linear decay with a floor") {
    const float alpha0 = 0.025f;
    CHECK(lr_at(0, 1000, alpha0) == doctest::Approx(alpha0));
    CHECK(lr_at(500, 1000, alpha0) == doctest::Approx(alpha0 / 2));
    CHECK(lr_at(1000, 1000, alpha0) == doctest::Approx(alpha0 * 1e-4));
    CHECK(lr_at(5000, 1000, alpha0) == doctest::Approx(alpha0 * 1e-4));

    float prev = alpha0;
    for (uint64_t w = 0; w <= 2000; w += 50) {
        float a = lr_at(w, 1000, alpha0);
        CHECK(a <= prev);
        CHECK(a >= alpha0 * 1e-4f * 0.999f);
        prev = a;
    }
    CHECK_THROWS_AS(lr_at(1, 0, alpha0), Error);
}

TEST_CASE("save_embeddings header and line count") {
    Vocabulary v = make_vocab({{"b", 2}, {"a", 5}, {"c", 1}});
    EmbeddingModel m = init_model(v.size(), 4, 9);
    TempFile f("model_save_test.txt");
    save_embeddings(m, v, f.path);

    std::ifstream in(f.path);
    std::string line;
    size_t lines = 0;
    REQUIRE(std::getline(in, line));
    CHECK(line == "3 4");
    ++lines;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == static_cast<size_t>(v.size()) + 1);
}

TEST_CASE("save then load round-trips tokens and values") {
    Vocabulary v = make_vocab({{"x", 9}, {"y", 5}, {"z", 2}});
    EmbeddingModel m = init_model(v.size(), 6, 123);
    m.input[3] = 1.25f;
    m.input[7] = -0.000004f; // rounds to zero in 6 decimals, still within 1e-5
    TempFile f("model_roundtrip_test.txt");
    save_embeddings(m, v, f.path);

    LoadedEmbeddings emb = load_embeddings(f.path);
    REQUIRE(emb.count == v.size());
    REQUIRE(emb.dim == 6);
    for (int32_t w = 0; w < v.size(); ++w) {
        CHECK(emb.tokens[static_cast<size_t>(w)] == v.entry(w).token);
        for (int k = 0; k < 6; ++k) {
            CHECK(std::abs(emb.row(w)[k] - m.in_row(w)[k]) <= 1e-5f);
        }
    }
}

TEST_CASE("save_embeddings can persist the output matrix") {
    Vocabulary v = make_vocab({{"x", 1}});
    EmbeddingModel m = init_model(1, 3, 1);
    m.output = {1.0f, 2.0f, 3.0f};
    TempFile f("model_output_test.txt");
    save_embeddings(m, v, f.path, MatrixKind::output);
    LoadedEmbeddings emb = load_embeddings(f.path);
    CHECK(emb.row(0)[0] == doctest::Approx(1.0f));
    CHECK(emb.row(0)[2] == doctest::Approx(3.0f));
}

TEST_CASE("load_embeddings rejects malformed inputs with distinct errors") {
    auto write_file = [](const std::string& path, const std::string& text) {
        std::ofstream out(path);
        out << text;
    };

    SUBCASE("malformed header") {
        TempFile f("emb_bad_header.txt");
        write_file(f.path, "three four\na 1 2 3 4\n");
        try {
            load_embeddings(f.path);
            FAIL("expected bad_format");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::bad_format);
        }
    }
    SUBCASE("row with too few values") {
        TempFile f("emb_short_row.txt");
        write_file(f.path, "2 3\na 0.1 0.2 0.3\nb 0.1 0.2\n");
        try {
            load_embeddings(f.path);
            FAIL("expected dim_mismatch");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::dim_mismatch);
        }
    }
    SUBCASE("row with too many values") {
        TempFile f("emb_long_row.txt");
        write_file(f.path, "1 2\na 0.1 0.2 0.3\n");
        try {
            load_embeddings(f.path);
            FAIL("expected dim_mismatch");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::dim_mismatch);
        }
    }
    SUBCASE("header declaring more rows than present") {
        TempFile f("emb_row_count.txt");
        write_file(f.path, "3 2\na 0.1 0.2\nb 0.3 0.4\n");
        try {
            load_embeddings(f.path);
            FAIL("expected row_count_mismatch");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::row_count_mismatch);
        }
    }
    SUBCASE("more rows than the header declares") {
        TempFile f("emb_extra_rows.txt");
        write_file(f.path, "1 2\na 0.1 0.2\nb 0.3 0.4\n");
        try {
            load_embeddings(f.path);
            FAIL("expected row_count_mismatch");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::row_count_mismatch);
        }
    }
    SUBCASE("duplicate token") {
        TempFile f("emb_dup.txt");
        write_file(f.path, "2 2\na 0.1 0.2\na 0.3 0.4\n");
        try {
            load_embeddings(f.path);
            FAIL("expected duplicate_token");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::duplicate_token);
        }
    }
    SUBCASE("missing file") {
        try {
            load_embeddings("no_such_embedding_file.txt");
            FAIL("expected io");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::io);
        }
    }
}
