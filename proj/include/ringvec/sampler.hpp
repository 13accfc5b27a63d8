#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <span>
#include <vector>

#include "ringvec/corpus.hpp"
#include "ringvec/rng.hpp"

namespace ringvec {

// Unigram table: slot occupancy of each id is proportional to count^power
// within one slot of rounding. Immutable once built, shared by all workers.
class NegativeTable {
public:
    static NegativeTable build(const Vocabulary& vocab, double power, uint64_t table_size);

    int32_t sample(Rng& rng) const { return slots_[rng.next_below(slots_.size())]; }
    uint64_t size() const { return slots_.size(); }
    int32_t slot(uint64_t i) const { return slots_[i]; }
    double power() const { return power_; }

private:
    std::vector<int32_t> slots_;
    double power_ = 0.75;
};

void draw_negatives(const NegativeTable& table, Rng& rng, int n, int32_t* out);

// Up to S post-subsampling sentences plus L*N precomputed negative ids per
// sentence (N per target position, shared by that window's context words).
// Immutable once assembled.
struct SentenceBatch {
    std::vector<EncodedSentence> sentences;
    std::vector<std::vector<int32_t>> negatives;

    bool empty() const { return sentences.empty(); }
    uint64_t word_count() const {
        uint64_t n = 0;
        for (const auto& s : sentences) n += s.length();
        return n;
    }
};

// Pulls up to max_sentences non-empty post-subsampling sentences starting at
// stream[cursor], advancing cursor past every sentence inspected. An empty
// keep_prob vector disables subsampling. An exhausted stream yields an empty
// batch.
SentenceBatch assemble_batch(std::span<const EncodedSentence> stream, size_t& cursor,
                             uint64_t max_sentences, int negatives_per_window,
                             const NegativeTable& table,
                             const std::vector<double>& keep_prob, Rng& rng);

// Bounded MPMC queue connecting batch producers to trainer workers.
class BatchQueue {
public:
    explicit BatchQueue(size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

    // Blocks while full; returns false if the queue was closed.
    bool push(SentenceBatch&& batch);
    // Blocks while empty; returns false once closed and drained.
    bool pop(SentenceBatch& out);
    void close();

private:
    std::mutex mutex_;
    std::condition_variable not_full_;
    std::condition_variable not_empty_;
    std::deque<SentenceBatch> items_;
    size_t capacity_;
    bool closed_ = false;
};

} // namespace ringvec
