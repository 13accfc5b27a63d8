#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ringvec/config.hpp"
#include "ringvec/corpus.hpp"
#include "ringvec/model.hpp"
#include "ringvec/traffic.hpp"

namespace ringvec {

// Context positions of target i: j with max(0, i-W_f) <= j <= min(L-1, i+W_f),
// j != i, ascending.
std::vector<int> context_positions(int target, int context_width, int length);

// Fixed-capacity circular buffer of 2*W_f+1 position-keyed context-word
// vectors mimicking the sliding window. Each sentence position is loaded from
// the input matrix exactly once and written back exactly once (on eviction or
// at sentence end).
class ContextRing {
public:
    ContextRing(int context_width, int dim);

    void begin_sentence(std::span<const int32_t> ids);
    // Loads every position entering the span of `target`, evicting and
    // writing back the positions the slots previously held.
    void advance(EmbeddingModel& model, int target, TrafficCounters& tc);
    // Writes back all resident positions at sentence end.
    void finish(EmbeddingModel& model, TrafficCounters& tc);

    int capacity() const { return capacity_; }
    int context_width() const { return width_; }
    size_t sentence_length() const { return ids_.size(); }

    // Live == resident and inside the current window span.
    bool is_live(int pos, int target) const;
    bool is_resident(int pos) const;
    float* vec_at(int pos);
    int32_t token_at(int pos) const;

    // Context access for one pairing: the first touch of a position is
    // attributed to its model read, later touches count as ring hits.
    float* touch(int pos, TrafficCounters& tc);

private:
    struct Slot {
        int pos = -1;
        bool used = false;
    };

    void write_back(EmbeddingModel& model, int slot_index, TrafficCounters& tc);

    int width_;
    int capacity_;
    int dim_;
    std::span<const int32_t> ids_;
    std::vector<Slot> slots_;
    std::vector<float> storage_;
    int next_load_ = 0;
};

// Per-worker reusable buffers.
struct TrainScratch {
    TrainScratch(int context_width, int dim, int negatives);

    ContextRing ring;
    int dim;
    std::vector<float> sample;      // one output vector
    std::vector<float*> ctx_ptrs;   // up to 2*W_f context vector pointers
    std::vector<int> ctx_pos;
    std::vector<float> window_vecs; // window-mode local context copies
    std::vector<float> snap_ctx;    // window_snapshot scratch
    std::vector<float> snap_smp;
    std::vector<float> delta_ctx;
    std::vector<float> delta_smp;
};

// Test instrumentation hooks; null in production runs.
class TrainObserver {
public:
    virtual ~TrainObserver() = default;
    // Called once per target, in processing order, before its window runs.
    virtual void on_target(uint64_t sentence_serial, size_t target_index) = 0;
};

// Sample-major window update against ring-resident context vectors: each
// sample (target first, then the N negatives) is loaded once, swept over all
// context words in ascending position order, and written back. Context
// updates from one sample are visible to the next.
void process_window(ContextRing& ring, EmbeddingModel& model, int target,
                    std::span<const int32_t> negatives, float alpha,
                    TrafficCounters& tc, TrainScratch& scratch,
                    bool snapshot_updates = false);

// Convenience overload allocating its own scratch.
void process_window(ContextRing& ring, EmbeddingModel& model, int target,
                    std::span<const int32_t> negatives, float alpha,
                    TrafficCounters& tc);

// Processes targets 0..L-1 strictly in order under the configured reuse mode.
// negatives must hold L*N ids. Returns words processed (L).
uint64_t train_sentence(EmbeddingModel& model, const EncodedSentence& sentence,
                        std::span<const int32_t> negatives, const TrainConfig& config,
                        float alpha, TrafficCounters& tc, TrainScratch& scratch,
                        TrainObserver* observer = nullptr, uint64_t sentence_serial = 0);

struct TrainResult {
    EmbeddingModel model;
    RunReport report;
};

// Full run: producer workers assemble batches, trainer workers consume them
// lock-free over the shared matrices. cfg.workers == 1 is fully
// deterministic for a fixed seed. on_epoch, when set, is invoked after each
// epoch with its stats.
TrainResult train(const Corpus& corpus, const TrainConfig& config,
                  TrainObserver* observer = nullptr,
                  const std::function<void(const EpochStats&)>& on_epoch = {});

} // namespace ringvec
