#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ringvec/corpus.hpp"

namespace ringvec {

// Input (context-word) and output (target/negative) embedding matrices,
// |V| x d each, row-major. Trainer workers mutate rows without locks under
// the Hogwild contract; words_trained is the shared schedule counter.
struct EmbeddingModel {
    int32_t vocab_size = 0;
    int dim = 0;
    std::vector<float> input;
    std::vector<float> output;
    std::atomic<uint64_t> words_trained{0};

    EmbeddingModel() = default;
    EmbeddingModel(EmbeddingModel&& other) noexcept
        : vocab_size(other.vocab_size), dim(other.dim),
          input(std::move(other.input)), output(std::move(other.output)),
          words_trained(other.words_trained.load(std::memory_order_relaxed)) {}
    EmbeddingModel& operator=(EmbeddingModel&& other) noexcept {
        vocab_size = other.vocab_size;
        dim = other.dim;
        input = std::move(other.input);
        output = std::move(other.output);
        words_trained.store(other.words_trained.load(std::memory_order_relaxed),
                            std::memory_order_relaxed);
        return *this;
    }

    float* in_row(int32_t w) { return input.data() + static_cast<size_t>(w) * dim; }
    const float* in_row(int32_t w) const { return input.data() + static_cast<size_t>(w) * dim; }
    float* out_row(int32_t w) { return output.data() + static_cast<size_t>(w) * dim; }
    const float* out_row(int32_t w) const { return output.data() + static_cast<size_t>(w) * dim; }
};

// Input matrix i.i.d. uniform on [-0.5/d, +0.5/d], output matrix zero.
EmbeddingModel init_model(int32_t vocab_size, int dim, uint64_t seed);

// Logistic 1/(1+e^-x) with x clamped to [-6, 6].
float sigmoid(float x);

// Linear decay with floor: max(alpha0 * (1 - trained/total), alpha0 * 1e-4).
float lr_at(uint64_t words_trained, uint64_t total_words, float alpha0);

enum class MatrixKind { input, output };

// Text format: "<|V|> <d>" header, then one "token v_1 .. v_d" line per word
// in vocabulary order.
void save_embeddings(const EmbeddingModel& model, const Vocabulary& vocab,
                     const std::string& path, MatrixKind which = MatrixKind::input);

struct LoadedEmbeddings {
    std::vector<std::string> tokens;
    std::unordered_map<std::string, int32_t> index;
    int32_t count = 0;
    int dim = 0;
    std::vector<float> vectors;

    int32_t id_of(const std::string& token) const {
        auto it = index.find(token);
        return it == index.end() ? -1 : it->second;
    }
    float* row(int32_t i) { return vectors.data() + static_cast<size_t>(i) * dim; }
    const float* row(int32_t i) const { return vectors.data() + static_cast<size_t>(i) * dim; }
};

LoadedEmbeddings load_embeddings(const std::string& path);

} // namespace ringvec
