#include "ringvec/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <cstring>
#include <mutex>
#include <thread>

#include "ringvec/error.hpp"
#include "ringvec/kernels.hpp"
#include "ringvec/sampler.hpp"

namespace ringvec {

std::vector<int> context_positions(int target, int context_width, int length) {
    if (target < 0 || target >= length) {
        raise(ErrorCode::bad_argument, "target position out of sentence bounds");
    }
    std::vector<int> positions;
    int lo = std::max(0, target - context_width);
    int hi = std::min(length - 1, target + context_width);
    positions.reserve(static_cast<size_t>(hi - lo));
    for (int j = lo; j <= hi; ++j) {
        if (j != target) positions.push_back(j);
    }
    return positions;
}

ContextRing::ContextRing(int context_width, int dim)
    : width_(context_width), capacity_(2 * context_width + 1), dim_(dim),
      slots_(static_cast<size_t>(capacity_)),
      storage_(static_cast<size_t>(capacity_) * static_cast<size_t>(dim)) {
    if (context_width < 1) raise(ErrorCode::bad_argument, "context width must be >= 1");
    if (dim < 1) raise(ErrorCode::bad_argument, "dim must be >= 1");
}

void ContextRing::begin_sentence(std::span<const int32_t> ids) {
    ids_ = ids;
    next_load_ = 0;
    for (Slot& s : slots_) s = Slot{};
}

void ContextRing::write_back(EmbeddingModel& model, int slot_index, TrafficCounters& tc) {
    Slot& slot = slots_[static_cast<size_t>(slot_index)];
    std::memcpy(model.in_row(ids_[static_cast<size_t>(slot.pos)]),
                storage_.data() + static_cast<size_t>(slot_index) * dim_,
                static_cast<size_t>(dim_) * sizeof(float));
    ++tc.context_writes;
    slot = Slot{};
}

void ContextRing::advance(EmbeddingModel& model, int target, TrafficCounters& tc) {
    int hi = std::min(static_cast<int>(ids_.size()) - 1, target + width_);
    while (next_load_ <= hi) {
        int slot_index = next_load_ % capacity_;
        Slot& slot = slots_[static_cast<size_t>(slot_index)];
        if (slot.pos >= 0) write_back(model, slot_index, tc);
        std::memcpy(storage_.data() + static_cast<size_t>(slot_index) * dim_,
                    model.in_row(ids_[static_cast<size_t>(next_load_)]),
                    static_cast<size_t>(dim_) * sizeof(float));
        ++tc.context_reads;
        slot.pos = next_load_;
        slot.used = false;
        ++next_load_;
    }
}

void ContextRing::finish(EmbeddingModel& model, TrafficCounters& tc) {
    for (int s = 0; s < capacity_; ++s) {
        if (slots_[static_cast<size_t>(s)].pos >= 0) write_back(model, s, tc);
    }
}

bool ContextRing::is_resident(int pos) const {
    if (pos < 0 || pos >= static_cast<int>(ids_.size())) return false;
    return slots_[static_cast<size_t>(pos % capacity_)].pos == pos;
}

bool ContextRing::is_live(int pos, int target) const {
    return is_resident(pos) && std::abs(pos - target) <= width_;
}

float* ContextRing::vec_at(int pos) {
    return storage_.data() + static_cast<size_t>(pos % capacity_) * dim_;
}

int32_t ContextRing::token_at(int pos) const {
    return ids_[static_cast<size_t>(pos)];
}

float* ContextRing::touch(int pos, TrafficCounters& tc) {
    Slot& slot = slots_[static_cast<size_t>(pos % capacity_)];
    if (slot.used) {
        ++tc.ring_hits;
    } else {
        slot.used = true; // first pairing is served by the model read
    }
    return storage_.data() + static_cast<size_t>(pos % capacity_) * dim_;
}

TrainScratch::TrainScratch(int context_width, int dim, int negatives)
    : ring(context_width, dim), dim(dim), sample(static_cast<size_t>(dim)) {
    size_t span = 2 * static_cast<size_t>(context_width);
    size_t samples = static_cast<size_t>(negatives) + 1;
    ctx_ptrs.resize(span);
    ctx_pos.resize(span);
    window_vecs.resize(span * static_cast<size_t>(dim));
    snap_ctx.resize(span * static_cast<size_t>(dim));
    snap_smp.resize(samples * static_cast<size_t>(dim));
    delta_ctx.resize(span * static_cast<size_t>(dim));
    delta_smp.resize(samples * static_cast<size_t>(dim));
}

namespace {

// Fills scratch.ctx_pos with the context positions of `target`; returns the
// count.
inline int collect_context(int target, int context_width, int length, int* out) {
    int lo = std::max(0, target - context_width);
    int hi = std::min(length - 1, target + context_width);
    int n = 0;
    for (int j = lo; j <= hi; ++j) {
        if (j != target) out[n++] = j;
    }
    return n;
}

// Incremental sample-major sweep shared by the cached modes: context vectors
// live behind ctx_ptrs, the sample vector is staged in scratch.sample.
template <class TouchFn>
inline void sweep_samples(EmbeddingModel& model, int32_t target_id,
                          std::span<const int32_t> negatives, float alpha,
                          float* const* ctx, int n_ctx, float* sample_buf,
                          TrafficCounters& tc, int dim, TouchFn&& touch_pairing) {
    int samples = static_cast<int>(negatives.size()) + 1;
    size_t bytes = static_cast<size_t>(dim) * sizeof(float);
    for (int k = 0; k < samples; ++k) {
        int32_t sid = k == 0 ? target_id : negatives[static_cast<size_t>(k - 1)];
        float label = k == 0 ? 1.0f : 0.0f;
        std::memcpy(sample_buf, model.out_row(sid), bytes);
        ++tc.sample_reads;
        for (int j = 0; j < n_ctx; ++j) {
            touch_pairing(j);
            float f = dot_f32(ctx[j], sample_buf, dim);
            float g = (label - sigmoid(f)) * alpha;
            pairing_update_f32(ctx[j], sample_buf, g, dim);
        }
        std::memcpy(model.out_row(sid), sample_buf, bytes);
        ++tc.sample_writes;
    }
}

// Diagnostic order: every pairing computed against window-entry values, the
// summed updates applied afterwards.
void sweep_samples_snapshot(EmbeddingModel& model, ContextRing& ring, int32_t target_id,
                            std::span<const int32_t> negatives, float alpha,
                            const int* ctx_pos, int n_ctx, TrafficCounters& tc,
                            TrainScratch& scratch) {
    int dim = scratch.dim;
    int samples = static_cast<int>(negatives.size()) + 1;
    size_t bytes = static_cast<size_t>(dim) * sizeof(float);

    for (int j = 0; j < n_ctx; ++j) {
        std::memcpy(scratch.snap_ctx.data() + static_cast<size_t>(j) * dim,
                    ring.vec_at(ctx_pos[j]), bytes);
    }
    for (int k = 0; k < samples; ++k) {
        int32_t sid = k == 0 ? target_id : negatives[static_cast<size_t>(k - 1)];
        std::memcpy(scratch.snap_smp.data() + static_cast<size_t>(k) * dim,
                    model.out_row(sid), bytes);
        ++tc.sample_reads;
    }
    std::fill_n(scratch.delta_ctx.data(), static_cast<size_t>(n_ctx) * dim, 0.0f);
    std::fill_n(scratch.delta_smp.data(), static_cast<size_t>(samples) * dim, 0.0f);

    for (int k = 0; k < samples; ++k) {
        float label = k == 0 ? 1.0f : 0.0f;
        const float* smp = scratch.snap_smp.data() + static_cast<size_t>(k) * dim;
        float* dsmp = scratch.delta_smp.data() + static_cast<size_t>(k) * dim;
        for (int j = 0; j < n_ctx; ++j) {
            ring.touch(ctx_pos[j], tc);
            const float* cv = scratch.snap_ctx.data() + static_cast<size_t>(j) * dim;
            float f = dot_f32(cv, smp, dim);
            float g = (label - sigmoid(f)) * alpha;
            axpy_f32(scratch.delta_ctx.data() + static_cast<size_t>(j) * dim, smp, g, dim);
            axpy_f32(dsmp, cv, g, dim);
        }
    }

    for (int j = 0; j < n_ctx; ++j) {
        const float* delta = scratch.delta_ctx.data() + static_cast<size_t>(j) * dim;
        float* cv = ring.vec_at(ctx_pos[j]);
        for (int k = 0; k < dim; ++k) cv[k] += delta[k];
    }
    for (int k = 0; k < samples; ++k) {
        int32_t sid = k == 0 ? target_id : negatives[static_cast<size_t>(k - 1)];
        const float* delta = scratch.delta_smp.data() + static_cast<size_t>(k) * dim;
        float* row = model.out_row(sid);
        for (int i = 0; i < dim; ++i) row[i] += delta[i];
        ++tc.sample_writes;
    }
}

} // namespace

void process_window(ContextRing& ring, EmbeddingModel& model, int target,
                    std::span<const int32_t> negatives, float alpha,
                    TrafficCounters& tc, TrainScratch& scratch, bool snapshot_updates) {
    int length = static_cast<int>(ring.sentence_length());
    int n_ctx = collect_context(target, ring.context_width(), length, scratch.ctx_pos.data());
    if (n_ctx == 0) return;

    int32_t target_id = ring.token_at(target);
    if (snapshot_updates) {
        sweep_samples_snapshot(model, ring, target_id, negatives, alpha,
                               scratch.ctx_pos.data(), n_ctx, tc, scratch);
        return;
    }
    for (int j = 0; j < n_ctx; ++j) scratch.ctx_ptrs[static_cast<size_t>(j)] = ring.vec_at(scratch.ctx_pos[j]);
    sweep_samples(model, target_id, negatives, alpha, scratch.ctx_ptrs.data(), n_ctx,
                  scratch.sample.data(), tc, scratch.dim,
                  [&](int j) { ring.touch(scratch.ctx_pos[j], tc); });
}

void process_window(ContextRing& ring, EmbeddingModel& model, int target,
                    std::span<const int32_t> negatives, float alpha, TrafficCounters& tc) {
    TrainScratch scratch(ring.context_width(), model.dim,
                         static_cast<int>(negatives.size()));
    process_window(ring, model, target, negatives, alpha, tc, scratch);
}

namespace {

uint64_t train_sentence_ring(EmbeddingModel& model, const EncodedSentence& sentence,
                             std::span<const int32_t> negatives, int n_neg, float alpha,
                             TrafficCounters& tc, TrainScratch& scratch,
                             TrainObserver* observer, uint64_t serial,
                             bool snapshot_updates) {
    int length = static_cast<int>(sentence.length());
    ContextRing& ring = scratch.ring;
    ring.begin_sentence(sentence.ids);
    for (int i = 0; i < length; ++i) {
        if (observer) observer->on_target(serial, static_cast<size_t>(i));
        ring.advance(model, i, tc);
        process_window(ring, model, i,
                       negatives.subspan(static_cast<size_t>(i) * n_neg,
                                         static_cast<size_t>(n_neg)),
                       alpha, tc, scratch, snapshot_updates);
    }
    ring.finish(model, tc);
    return static_cast<uint64_t>(length);
}

uint64_t train_sentence_window(EmbeddingModel& model, const EncodedSentence& sentence,
                               std::span<const int32_t> negatives, int context_width,
                               int n_neg, float alpha, TrafficCounters& tc,
                               TrainScratch& scratch, TrainObserver* observer,
                               uint64_t serial) {
    int length = static_cast<int>(sentence.length());
    int dim = scratch.dim;
    size_t bytes = static_cast<size_t>(dim) * sizeof(float);
    for (int i = 0; i < length; ++i) {
        if (observer) observer->on_target(serial, static_cast<size_t>(i));
        int n_ctx = collect_context(i, context_width, length, scratch.ctx_pos.data());
        if (n_ctx == 0) continue;

        for (int j = 0; j < n_ctx; ++j) {
            float* local = scratch.window_vecs.data() + static_cast<size_t>(j) * dim;
            std::memcpy(local, model.in_row(sentence.ids[static_cast<size_t>(scratch.ctx_pos[j])]),
                        bytes);
            ++tc.context_reads;
            scratch.ctx_ptrs[static_cast<size_t>(j)] = local;
        }
        sweep_samples(model, sentence.ids[static_cast<size_t>(i)],
                      negatives.subspan(static_cast<size_t>(i) * n_neg,
                                        static_cast<size_t>(n_neg)),
                      alpha, scratch.ctx_ptrs.data(), n_ctx, scratch.sample.data(), tc, dim,
                      [](int) {});
        // First sample's access to each context word is served by the read
        // above, the remaining N come from the window-local copy.
        tc.ring_hits += static_cast<uint64_t>(n_ctx) * static_cast<uint64_t>(n_neg);
        for (int j = 0; j < n_ctx; ++j) {
            std::memcpy(model.in_row(sentence.ids[static_cast<size_t>(scratch.ctx_pos[j])]),
                        scratch.window_vecs.data() + static_cast<size_t>(j) * dim, bytes);
            ++tc.context_writes;
        }
    }
    return static_cast<uint64_t>(length);
}

uint64_t train_sentence_direct(EmbeddingModel& model, const EncodedSentence& sentence,
                               std::span<const int32_t> negatives, int context_width,
                               int n_neg, float alpha, TrafficCounters& tc,
                               TrainScratch& scratch, TrainObserver* observer,
                               uint64_t serial) {
    int length = static_cast<int>(sentence.length());
    int dim = scratch.dim;
    size_t bytes = static_cast<size_t>(dim) * sizeof(float);
    float* sample_buf = scratch.sample.data();
    for (int i = 0; i < length; ++i) {
        if (observer) observer->on_target(serial, static_cast<size_t>(i));
        int n_ctx = collect_context(i, context_width, length, scratch.ctx_pos.data());
        if (n_ctx == 0) continue;

        auto negs = negatives.subspan(static_cast<size_t>(i) * n_neg, static_cast<size_t>(n_neg));
        int32_t target_id = sentence.ids[static_cast<size_t>(i)];
        for (int k = 0; k <= n_neg; ++k) {
            int32_t sid = k == 0 ? target_id : negs[static_cast<size_t>(k - 1)];
            float label = k == 0 ? 1.0f : 0.0f;
            for (int j = 0; j < n_ctx; ++j) {
                std::memcpy(sample_buf, model.out_row(sid), bytes);
                ++tc.sample_reads;
                float* cv = model.in_row(sentence.ids[static_cast<size_t>(scratch.ctx_pos[j])]);
                ++tc.context_reads;
                float f = dot_f32(cv, sample_buf, dim);
                float g = (label - sigmoid(f)) * alpha;
                pairing_update_f32(cv, sample_buf, g, dim);
                ++tc.context_writes;
                std::memcpy(model.out_row(sid), sample_buf, bytes);
                ++tc.sample_writes;
            }
        }
    }
    return static_cast<uint64_t>(length);
}

} // namespace

uint64_t train_sentence(EmbeddingModel& model, const EncodedSentence& sentence,
                        std::span<const int32_t> negatives, const TrainConfig& config,
                        float alpha, TrafficCounters& tc, TrainScratch& scratch,
                        TrainObserver* observer, uint64_t sentence_serial) {
    int n_neg = config.negatives;
    if (negatives.size() != sentence.length() * static_cast<size_t>(n_neg)) {
        raise(ErrorCode::bad_argument, "negatives array must hold L*N ids");
    }
    int cw = config.context_width();
    switch (config.reuse_mode) {
    case ReuseMode::lifetime:
        return train_sentence_ring(model, sentence, negatives, n_neg, alpha, tc, scratch,
                                   observer, sentence_serial, false);
    case ReuseMode::window_snapshot:
        return train_sentence_ring(model, sentence, negatives, n_neg, alpha, tc, scratch,
                                   observer, sentence_serial, true);
    case ReuseMode::window:
        return train_sentence_window(model, sentence, negatives, cw, n_neg, alpha, tc, scratch,
                                     observer, sentence_serial);
    case ReuseMode::none:
        return train_sentence_direct(model, sentence, negatives, cw, n_neg, alpha, tc, scratch,
                                     observer, sentence_serial);
    }
    raise(ErrorCode::bad_argument, "unknown reuse mode");
}

namespace {

// Batch-assembly throughput is CPU time spent assembling, not wall time:
// producers share cores with trainer workers and wall time would mostly
// measure preemption.
uint64_t thread_cpu_nanos() {
#if defined(CLOCK_THREAD_CPUTIME_ID)
    timespec ts{};
    if (clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts) == 0) {
        return static_cast<uint64_t>(ts.tv_sec) * 1'000'000'000ULL +
               static_cast<uint64_t>(ts.tv_nsec);
    }
#endif
    return static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                     std::chrono::steady_clock::now().time_since_epoch())
                                     .count());
}

// Expected post-subsampling tokens per epoch; the learning-rate schedule
// denominator mirrors the conventional pre-subsampling linear decay.
uint64_t expected_epoch_words(const Vocabulary& vocab, const std::vector<double>& keep_prob) {
    if (keep_prob.empty()) return vocab.total_retained_tokens();
    double expected = 0.0;
    for (int32_t w = 0; w < vocab.size(); ++w) {
        expected += static_cast<double>(vocab.entry(w).count) * keep_prob[static_cast<size_t>(w)];
    }
    uint64_t rounded = static_cast<uint64_t>(expected + 0.5);
    return rounded > 0 ? rounded : 1;
}

} // namespace

TrainResult train(const Corpus& corpus, const TrainConfig& raw_config, TrainObserver* observer,
                  const std::function<void(const EpochStats&)>& on_epoch) {
    TrainConfig cfg = resolve_config(raw_config);
    validate_config(cfg);

    const Vocabulary& vocab = corpus.vocab;
    if (vocab.size() < 1) raise(ErrorCode::empty_vocab, "corpus has an empty vocabulary");

    std::vector<double> keep_prob = subsample_keep_probs(vocab, cfg.subsample);
    NegativeTable table = NegativeTable::build(vocab, cfg.table_power, cfg.table_size);

    TrainResult result;
    result.model = init_model(vocab.size(), cfg.dim, cfg.seed);
    result.report.config = cfg;
    result.report.vocab_size = static_cast<uint64_t>(vocab.size());

    uint64_t schedule_total = 1;
    if (cfg.epochs > 0) {
        schedule_total = std::max<uint64_t>(
            1, static_cast<uint64_t>(cfg.epochs) * expected_epoch_words(vocab, keep_prob));
    }

    int workers = cfg.workers;
    size_t n_sentences = corpus.sentences.size();
    std::span<const EncodedSentence> all(corpus.sentences);

    std::atomic<uint64_t> sentence_serial{0};
    std::atomic<uint64_t> batch_words_total{0};
    std::atomic<uint64_t> batch_cpu_nanos_total{0};
    std::atomic<uint64_t> batch_wall_nanos_total{0};

    auto run_start = std::chrono::steady_clock::now();

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        BatchQueue queue(cfg.queue_capacity);
        std::atomic<int> producers_left{workers};

        auto epoch_start = std::chrono::steady_clock::now();

        std::vector<std::thread> producers;
        producers.reserve(static_cast<size_t>(workers));
        size_t chunk = workers > 0 ? (n_sentences + workers - 1) / workers : n_sentences;
        for (int p = 0; p < workers; ++p) {
            size_t begin = std::min(n_sentences, static_cast<size_t>(p) * chunk);
            size_t end = std::min(n_sentences, begin + chunk);
            producers.emplace_back([&, p, begin, end] {
                std::span<const EncodedSentence> segment = all.subspan(begin, end - begin);
                size_t cursor = 0;
                uint64_t words = 0;
                uint64_t cpu_nanos = 0;
                uint64_t wall_nanos = 0;
                for (uint64_t k = 0; cursor < segment.size(); ++k) {
                    Rng rng = Rng::derive(cfg.seed, static_cast<uint64_t>(epoch),
                                          static_cast<uint64_t>(p), k);
                    uint64_t c0 = thread_cpu_nanos();
                    auto w0 = std::chrono::steady_clock::now();
                    SentenceBatch batch =
                        assemble_batch(segment, cursor, cfg.batch_sentences, cfg.negatives,
                                       table, keep_prob, rng);
                    cpu_nanos += thread_cpu_nanos() - c0;
                    wall_nanos += static_cast<uint64_t>(
                        std::chrono::duration_cast<std::chrono::nanoseconds>(
                            std::chrono::steady_clock::now() - w0)
                            .count());
                    words += batch.word_count();
                    if (!batch.empty() && !queue.push(std::move(batch))) break;
                }
                batch_words_total.fetch_add(words, std::memory_order_relaxed);
                batch_cpu_nanos_total.fetch_add(cpu_nanos, std::memory_order_relaxed);
                batch_wall_nanos_total.fetch_add(wall_nanos, std::memory_order_relaxed);
                if (producers_left.fetch_sub(1) == 1) queue.close();
            });
        }

        std::mutex merge_mutex;
        uint64_t epoch_words = 0;
        std::vector<std::thread> trainers;
        trainers.reserve(static_cast<size_t>(workers));
        for (int t = 0; t < workers; ++t) {
            trainers.emplace_back([&] {
                TrainScratch scratch(cfg.context_width(), cfg.dim, cfg.negatives);
                TrafficCounters local;
                TrafficCounters local_analytic;
                uint64_t local_words = 0;
                uint64_t local_sentences = 0;
                SentenceBatch batch;
                while (queue.pop(batch)) {
                    for (size_t s = 0; s < batch.sentences.size(); ++s) {
                        const EncodedSentence& sentence = batch.sentences[s];
                        float alpha =
                            lr_at(result.model.words_trained.load(std::memory_order_relaxed),
                                  schedule_total, cfg.alpha0);
                        uint64_t serial =
                            sentence_serial.fetch_add(1, std::memory_order_relaxed);
                        train_sentence(result.model, sentence, batch.negatives[s], cfg, alpha,
                                       local, scratch, observer, serial);
                        result.model.words_trained.fetch_add(sentence.length(),
                                                             std::memory_order_relaxed);
                        local_words += sentence.length();
                        local_sentences += 1;
                        local_analytic += analytic_traffic(sentence.length(), cfg.context_width(),
                                                           cfg.negatives, cfg.reuse_mode);
                    }
                }
                std::lock_guard lock(merge_mutex);
                result.report.traffic += local;
                result.report.analytic += local_analytic;
                result.report.sentences_trained += local_sentences;
                epoch_words += local_words;
            });
        }

        for (auto& th : producers) th.join();
        for (auto& th : trainers) th.join();

        auto epoch_end = std::chrono::steady_clock::now();
        double seconds = std::chrono::duration<double>(epoch_end - epoch_start).count();
        EpochStats stats;
        stats.epoch = epoch;
        stats.words = epoch_words;
        stats.seconds = seconds;
        stats.words_per_sec = seconds > 0.0 ? static_cast<double>(epoch_words) / seconds : 0.0;
        result.report.epochs.push_back(stats);
        result.report.words_trained += epoch_words;
        if (on_epoch) on_epoch(stats);
    }

    auto run_end = std::chrono::steady_clock::now();
    result.report.wall_seconds = std::chrono::duration<double>(run_end - run_start).count();
    // Thread CPU time when the clock registered the work (it may be too
    // coarse for very small corpora); wall time spent assembling otherwise.
    uint64_t nanos = batch_cpu_nanos_total.load();
    if (nanos == 0) nanos = batch_wall_nanos_total.load();
    result.report.batching_words_per_sec =
        nanos > 0 ? static_cast<double>(batch_words_total.load()) * 1e9 /
                        static_cast<double>(nanos)
                  : 0.0;
    return result;
}

} // namespace ringvec
