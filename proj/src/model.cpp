#include "ringvec/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ringvec/error.hpp"
#include "ringvec/rng.hpp"

namespace ringvec {

EmbeddingModel init_model(int32_t vocab_size, int dim, uint64_t seed) {
    if (vocab_size < 1) raise(ErrorCode::bad_argument, "vocab size must be >= 1");
    if (dim < 1) raise(ErrorCode::bad_argument, "dim must be >= 1");

    EmbeddingModel m;
    m.vocab_size = vocab_size;
    m.dim = dim;
    size_t n = static_cast<size_t>(vocab_size) * static_cast<size_t>(dim);
    m.input.resize(n);
    m.output.assign(n, 0.0f);

    Rng rng = Rng::derive(seed, 0x696e6974); // "init" stream
    float inv_dim = 1.0f / static_cast<float>(dim);
    for (size_t i = 0; i < n; ++i) {
        m.input[i] = (rng.next_float() - 0.5f) * inv_dim;
    }
    return m;
}

float sigmoid(float x) {
    float clamped = std::clamp(x, -6.0f, 6.0f);
    return static_cast<float>(1.0 / (1.0 + std::exp(-static_cast<double>(clamped))));
}

float lr_at(uint64_t words_trained, uint64_t total_words, float alpha0) {
    if (total_words == 0) raise(ErrorCode::bad_argument, "total_words must be > 0");
    double progress = static_cast<double>(words_trained) / static_cast<double>(total_words);
    double alpha = static_cast<double>(alpha0) * (1.0 - progress);
    double floor = static_cast<double>(alpha0) * 1e-4;
    return static_cast<float>(std::max(alpha, floor));
}

void save_embeddings(const EmbeddingModel& model, const Vocabulary& vocab,
                     const std::string& path, MatrixKind which) {
    if (vocab.size() != model.vocab_size) {
        raise(ErrorCode::bad_argument, "model and vocabulary disagree on |V|");
    }
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) raise(ErrorCode::io, "cannot open embedding file for writing: " + path);

    std::fprintf(f, "%d %d\n", model.vocab_size, model.dim);
    std::string line;
    char num[64];
    for (int32_t w = 0; w < model.vocab_size; ++w) {
        line = vocab.entry(w).token;
        const float* row = which == MatrixKind::input ? model.in_row(w) : model.out_row(w);
        for (int k = 0; k < model.dim; ++k) {
            auto [ptr, ec] = std::to_chars(num, num + sizeof(num), row[k],
                                           std::chars_format::fixed, 6);
            line.push_back(' ');
            line.append(num, ptr);
        }
        line.push_back('\n');
        if (std::fwrite(line.data(), 1, line.size(), f) != line.size()) {
            std::fclose(f);
            raise(ErrorCode::io, "failed writing embedding file: " + path);
        }
    }
    if (std::fclose(f) != 0) raise(ErrorCode::io, "failed closing embedding file: " + path);
}

LoadedEmbeddings load_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::io, "cannot open embedding file: " + path);

    std::string line;
    if (!std::getline(in, line)) raise(ErrorCode::bad_format, "embedding file is empty: " + path);

    LoadedEmbeddings emb;
    {
        std::istringstream header(line);
        int64_t count = 0, dim = 0;
        std::string extra;
        if (!(header >> count >> dim) || (header >> extra) || count < 1 || dim < 1) {
            raise(ErrorCode::bad_format, "malformed embedding header: '" + line + "'");
        }
        emb.count = static_cast<int32_t>(count);
        emb.dim = static_cast<int>(dim);
    }
    emb.tokens.reserve(static_cast<size_t>(emb.count));
    emb.vectors.reserve(static_cast<size_t>(emb.count) * emb.dim);

    size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (rows == static_cast<size_t>(emb.count)) {
            raise(ErrorCode::row_count_mismatch,
                  "embedding file has more rows than the header declares");
        }
        size_t space = line.find(' ');
        if (space == std::string::npos || space == 0) {
            raise(ErrorCode::bad_format, "embedding row " + std::to_string(rows + 1) +
                                             " has no vector values");
        }
        std::string token = line.substr(0, space);
        if (emb.index.contains(token)) {
            raise(ErrorCode::duplicate_token, "duplicate token '" + token + "' in embedding file");
        }

        int parsed = 0;
        const char* p = line.data() + space;
        const char* end = line.data() + line.size();
        while (p != end) {
            while (p != end && *p == ' ') ++p;
            if (p == end) break;
            if (parsed == emb.dim) {
                raise(ErrorCode::dim_mismatch, "embedding row for '" + token + "' has more than " +
                                                   std::to_string(emb.dim) + " values");
            }
            float value = 0.0f;
            auto [next, ec] = std::from_chars(p, end, value);
            if (ec != std::errc()) {
                raise(ErrorCode::bad_format, "bad float in embedding row for '" + token + "'");
            }
            emb.vectors.push_back(value);
            ++parsed;
            p = next;
        }
        if (parsed != emb.dim) {
            raise(ErrorCode::dim_mismatch, "embedding row for '" + token + "' has " +
                                               std::to_string(parsed) + " values, expected " +
                                               std::to_string(emb.dim));
        }
        emb.index.emplace(token, static_cast<int32_t>(rows));
        emb.tokens.push_back(std::move(token));
        ++rows;
    }
    if (in.bad()) raise(ErrorCode::io, "I/O failure while reading embedding file: " + path);
    if (rows != static_cast<size_t>(emb.count)) {
        raise(ErrorCode::row_count_mismatch,
              "embedding file declares " + std::to_string(emb.count) + " rows but has " +
                  std::to_string(rows));
    }
    return emb;
}

} // namespace ringvec
