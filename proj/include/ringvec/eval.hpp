#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ringvec/model.hpp"

namespace ringvec {

struct SimilarityPair {
    std::string word1;
    std::string word2;
    double score = 0.0;
};

// Lines "word1<TAB>word2<TAB>score"; a header line whose third field is not
// numeric is skipped.
std::vector<SimilarityPair> load_similarity_benchmark(const std::string& path);

struct AnalogyQuadruple {
    std::string a, a_star, b, b_star;
};

// Lines "a a* b b*"; section headers starting with ':' are skipped.
std::vector<AnalogyQuadruple> load_analogy_set(const std::string& path);

// dot(u, v) / (|u| * |v|); throws zero_vector if either norm is zero.
double cosine(const float* u, const float* v, int dim);

// Average-rank tie handling; Pearson correlation of the two rank vectors.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct SimilarityResult {
    double rho = 0.0;
    size_t pairs_used = 0;
    size_t pairs_skipped = 0;
};

// Pairs with an out-of-vocabulary word are skipped and counted.
SimilarityResult eval_similarity(const LoadedEmbeddings& emb,
                                 const std::vector<SimilarityPair>& benchmark);

enum class AnalogyMethod { cos_add, cos_mul };

struct AnalogyResult {
    double accuracy = 0.0;
    size_t evaluated = 0;
    size_t skipped = 0;
};

// Scores unit-normalized copies. cos_add ranks by cos(x,b)-cos(x,a)+cos(x,a*);
// cos_mul by c(x,b)*c(x,a*)/(c(x,a)+eps) with cosines shifted into [0,1].
// Query words a, a*, b are never predicted; quadruples with any word out of
// vocabulary are excluded from the denominator.
AnalogyResult eval_analogy(const LoadedEmbeddings& emb,
                           const std::vector<AnalogyQuadruple>& quadruples,
                           AnalogyMethod method, int threads = 1);

struct Neighbor {
    std::string token;
    double cosine = 0.0;
};

// Top-k by cosine, query excluded, ties broken by vocabulary id.
std::vector<Neighbor> nearest_neighbors(const LoadedEmbeddings& emb,
                                        const std::string& word, int k);

} // namespace ringvec
