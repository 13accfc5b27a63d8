#include "ringvec/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "ringvec/error.hpp"

namespace ringvec {

namespace {

constexpr double kCosMulEpsilon = 0.001;

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream in(line);
    std::string field;
    while (in >> field) fields.push_back(std::move(field));
    return fields;
}

bool is_number(const std::string& s) {
    try {
        size_t used = 0;
        (void)std::stod(s, &used);
        return used == s.size();
    } catch (const std::exception&) {
        return false;
    }
}

} // namespace

namespace {

// Tab-separated when tabs are present (WS-353 style, tokens may hold spaces),
// whitespace-separated otherwise.
std::vector<std::string> split_benchmark_line(const std::string& line) {
    if (line.find('\t') == std::string::npos) return split_fields(line);
    std::vector<std::string> fields;
    size_t begin = 0;
    while (begin <= line.size()) {
        size_t end = line.find('\t', begin);
        if (end == std::string::npos) end = line.size();
        std::string field = line.substr(begin, end - begin);
        if (!field.empty() && field.back() == '\r') field.pop_back();
        if (!field.empty()) fields.push_back(std::move(field));
        begin = end + 1;
    }
    return fields;
}

} // namespace

std::vector<SimilarityPair> load_similarity_benchmark(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::io, "cannot open similarity benchmark: " + path);
    std::vector<SimilarityPair> pairs;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_benchmark_line(line);
        if (fields.empty()) continue;
        if (fields.size() != 3 || !is_number(fields[2])) {
            if (line_no == 1) continue; // header
            raise(ErrorCode::bad_format, "similarity line " + std::to_string(line_no) +
                                             " is not word1<TAB>word2<TAB>score");
        }
        pairs.push_back({std::move(fields[0]), std::move(fields[1]), std::stod(fields[2])});
    }
    return pairs;
}

std::vector<AnalogyQuadruple> load_analogy_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::io, "cannot open analogy set: " + path);
    std::vector<AnalogyQuadruple> quads;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == ':') continue; // section header
        auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (fields.size() != 4) {
            raise(ErrorCode::bad_format,
                  "analogy line " + std::to_string(line_no) + " does not have 4 fields");
        }
        quads.push_back({std::move(fields[0]), std::move(fields[1]), std::move(fields[2]),
                         std::move(fields[3])});
    }
    return quads;
}

double cosine(const float* u, const float* v, int dim) {
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (int k = 0; k < dim; ++k) {
        dot += static_cast<double>(u[k]) * v[k];
        nu += static_cast<double>(u[k]) * u[k];
        nv += static_cast<double>(v[k]) * v[k];
    }
    if (nu == 0.0 || nv == 0.0) {
        raise(ErrorCode::zero_vector, "cosine of a zero vector is undefined");
    }
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

namespace {

// Average ranks (1-based); tied values share the mean of their rank range.
std::vector<double> average_ranks(const std::vector<double>& values) {
    size_t n = values.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    size_t n = x.size();
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx;
        double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        raise(ErrorCode::no_usable_pairs, "rank correlation undefined: zero variance");
    }
    return sxy / std::sqrt(sxx * syy);
}

} // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) raise(ErrorCode::bad_argument, "spearman inputs differ in length");
    if (x.size() < 2) raise(ErrorCode::no_usable_pairs, "spearman needs at least 2 pairs");
    return pearson(average_ranks(x), average_ranks(y));
}

SimilarityResult eval_similarity(const LoadedEmbeddings& emb,
                                 const std::vector<SimilarityPair>& benchmark) {
    SimilarityResult result;
    std::vector<double> human;
    std::vector<double> predicted;
    for (const SimilarityPair& pair : benchmark) {
        int32_t w1 = emb.id_of(pair.word1);
        int32_t w2 = emb.id_of(pair.word2);
        if (w1 < 0 || w2 < 0) {
            ++result.pairs_skipped;
            continue;
        }
        human.push_back(pair.score);
        predicted.push_back(cosine(emb.row(w1), emb.row(w2), emb.dim));
    }
    result.pairs_used = human.size();
    if (result.pairs_used == 0) {
        raise(ErrorCode::no_usable_pairs, "no benchmark pair is fully in-vocabulary");
    }
    result.rho = spearman(predicted, human);
    return result;
}

namespace {

// Rows scaled to unit length; zero rows stay zero and can never win.
std::vector<float> unit_normalized(const LoadedEmbeddings& emb) {
    std::vector<float> out(emb.vectors.size());
    for (int32_t w = 0; w < emb.count; ++w) {
        const float* row = emb.row(w);
        double norm = 0.0;
        for (int k = 0; k < emb.dim; ++k) norm += static_cast<double>(row[k]) * row[k];
        norm = std::sqrt(norm);
        float scale = norm > 0.0 ? static_cast<float>(1.0 / norm) : 0.0f;
        float* dst = out.data() + static_cast<size_t>(w) * emb.dim;
        for (int k = 0; k < emb.dim; ++k) dst[k] = row[k] * scale;
    }
    return out;
}

double dot_rows(const float* a, const float* b, int dim) {
    double s = 0.0;
    for (int k = 0; k < dim; ++k) s += static_cast<double>(a[k]) * b[k];
    return s;
}

} // namespace

AnalogyResult eval_analogy(const LoadedEmbeddings& emb,
                           const std::vector<AnalogyQuadruple>& quadruples,
                           AnalogyMethod method, int threads) {
    std::vector<float> unit = unit_normalized(emb);
    int dim = emb.dim;
    int32_t count = emb.count;
    auto row = [&](int32_t w) { return unit.data() + static_cast<size_t>(w) * dim; };

    struct Resolved {
        int32_t a, a_star, b, b_star;
    };
    std::vector<Resolved> evaluable;
    size_t skipped = 0;
    for (const AnalogyQuadruple& q : quadruples) {
        Resolved r{emb.id_of(q.a), emb.id_of(q.a_star), emb.id_of(q.b), emb.id_of(q.b_star)};
        if (r.a < 0 || r.a_star < 0 || r.b < 0 || r.b_star < 0) {
            ++skipped;
            continue;
        }
        evaluable.push_back(r);
    }
    if (evaluable.empty()) {
        raise(ErrorCode::no_usable_pairs, "no analogy quadruple is fully in-vocabulary");
    }

    auto solve = [&](const Resolved& q) -> int32_t {
        const float* va = row(q.a);
        const float* va_star = row(q.a_star);
        const float* vb = row(q.b);
        int32_t best = -1;
        double best_score = -std::numeric_limits<double>::infinity();
        if (method == AnalogyMethod::cos_add) {
            // cos(x,b) - cos(x,a) + cos(x,a*) == dot(x, b - a + a*) for unit x.
            std::vector<float> query(static_cast<size_t>(dim));
            for (int k = 0; k < dim; ++k) query[static_cast<size_t>(k)] = vb[k] - va[k] + va_star[k];
            for (int32_t x = 0; x < count; ++x) {
                if (x == q.a || x == q.a_star || x == q.b) continue;
                double score = dot_rows(row(x), query.data(), dim);
                if (score > best_score) {
                    best_score = score;
                    best = x;
                }
            }
        } else {
            for (int32_t x = 0; x < count; ++x) {
                if (x == q.a || x == q.a_star || x == q.b) continue;
                const float* vx = row(x);
                double cb = (dot_rows(vx, vb, dim) + 1.0) / 2.0;
                double ca_star = (dot_rows(vx, va_star, dim) + 1.0) / 2.0;
                double ca = (dot_rows(vx, va, dim) + 1.0) / 2.0;
                double score = cb * ca_star / (ca + kCosMulEpsilon);
                if (score > best_score) {
                    best_score = score;
                    best = x;
                }
            }
        }
        return best;
    };

    size_t n = evaluable.size();
    std::atomic<size_t> correct{0};
    int n_threads = std::max(1, threads);
    if (n_threads == 1) {
        size_t hits = 0;
        for (const Resolved& q : evaluable) {
            if (solve(q) == q.b_star) ++hits;
        }
        correct = hits;
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        for (int t = 0; t < n_threads; ++t) {
            pool.emplace_back([&] {
                size_t hits = 0;
                for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                    if (solve(evaluable[i]) == evaluable[i].b_star) ++hits;
                }
                correct.fetch_add(hits);
            });
        }
        for (auto& th : pool) th.join();
    }

    AnalogyResult result;
    result.evaluated = n;
    result.skipped = skipped;
    result.accuracy = static_cast<double>(correct.load()) / static_cast<double>(n);
    return result;
}

std::vector<Neighbor> nearest_neighbors(const LoadedEmbeddings& emb,
                                        const std::string& word, int k) {
    int32_t query = emb.id_of(word);
    if (query < 0) raise(ErrorCode::oov_query, "'" + word + "' is not in the vocabulary");
    if (k < 1 || k >= emb.count) {
        raise(ErrorCode::bad_argument, "k must be in [1, |V|-1]");
    }
    {
        const float* q = emb.row(query);
        double norm = 0.0;
        for (int i = 0; i < emb.dim; ++i) norm += static_cast<double>(q[i]) * q[i];
        if (norm == 0.0) raise(ErrorCode::zero_vector, "query vector for '" + word + "' is zero");
    }

    struct Scored {
        double cos;
        int32_t id;
    };
    std::vector<Scored> scored;
    scored.reserve(static_cast<size_t>(emb.count) - 1);
    for (int32_t x = 0; x < emb.count; ++x) {
        if (x == query) continue;
        double c;
        try {
            c = cosine(emb.row(query), emb.row(x), emb.dim);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::zero_vector) continue; // untrained row
            throw;
        }
        scored.push_back({c, x});
    }
    auto better = [](const Scored& a, const Scored& b) {
        if (a.cos != b.cos) return a.cos > b.cos;
        return a.id < b.id;
    };
    size_t take = std::min(static_cast<size_t>(k), scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<ptrdiff_t>(take),
                      scored.end(), better);

    std::vector<Neighbor> result;
    result.reserve(take);
    for (size_t i = 0; i < take; ++i) {
        result.push_back({emb.tokens[static_cast<size_t>(scored[i].id)], scored[i].cos});
    }
    return result;
}

} // namespace ringvec
