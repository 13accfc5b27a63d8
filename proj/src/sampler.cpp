#include "ringvec/sampler.hpp"

#include <cmath>

#include "ringvec/error.hpp"

namespace ringvec {

NegativeTable NegativeTable::build(const Vocabulary& vocab, double power, uint64_t table_size) {
    if (table_size < static_cast<uint64_t>(vocab.size())) {
        raise(ErrorCode::bad_argument, "table_size must be >= |V|");
    }
    if (power < 0.0) raise(ErrorCode::bad_argument, "power must be >= 0");

    const auto& entries = vocab.entries();
    std::vector<double> cumulative(entries.size());
    double total = 0.0;
    for (size_t w = 0; w < entries.size(); ++w) {
        total += std::pow(static_cast<double>(entries[w].count), power);
        cumulative[w] = total;
    }

    NegativeTable table;
    table.power_ = power;
    table.slots_.resize(table_size);
    // Slot s belongs to the type whose cumulative bracket contains the slot
    // midpoint; shares round to within one slot of count^power proportions.
    size_t w = 0;
    for (uint64_t s = 0; s < table_size; ++s) {
        double midpoint = (static_cast<double>(s) + 0.5) / static_cast<double>(table_size) * total;
        while (w + 1 < entries.size() && midpoint >= cumulative[w]) ++w;
        table.slots_[s] = static_cast<int32_t>(w);
    }
    return table;
}

void draw_negatives(const NegativeTable& table, Rng& rng, int n, int32_t* out) {
    for (int i = 0; i < n; ++i) out[i] = table.sample(rng);
}

SentenceBatch assemble_batch(std::span<const EncodedSentence> stream, size_t& cursor,
                             uint64_t max_sentences, int negatives_per_window,
                             const NegativeTable& table,
                             const std::vector<double>& keep_prob, Rng& rng) {
    if (max_sentences < 1) raise(ErrorCode::bad_argument, "batch size must be >= 1");
    if (negatives_per_window < 0) raise(ErrorCode::bad_argument, "negatives must be >= 0");

    SentenceBatch batch;
    while (batch.sentences.size() < max_sentences && cursor < stream.size()) {
        EncodedSentence sentence = subsample_sentence(stream[cursor], keep_prob, rng);
        ++cursor;
        if (sentence.empty()) continue;

        std::vector<int32_t> negs(sentence.length() * static_cast<size_t>(negatives_per_window));
        for (size_t pos = 0; pos < sentence.length(); ++pos) {
            draw_negatives(table, rng, negatives_per_window,
                           negs.data() + pos * static_cast<size_t>(negatives_per_window));
        }
        batch.sentences.push_back(std::move(sentence));
        batch.negatives.push_back(std::move(negs));
    }
    return batch;
}

bool BatchQueue::push(SentenceBatch&& batch) {
    std::unique_lock lock(mutex_);
    not_full_.wait(lock, [this] { return items_.size() < capacity_ || closed_; });
    if (closed_) return false;
    items_.push_back(std::move(batch));
    lock.unlock();
    not_empty_.notify_one();
    return true;
}

bool BatchQueue::pop(SentenceBatch& out) {
    std::unique_lock lock(mutex_);
    not_empty_.wait(lock, [this] { return !items_.empty() || closed_; });
    if (items_.empty()) return false;
    out = std::move(items_.front());
    items_.pop_front();
    lock.unlock();
    not_full_.notify_one();
    return true;
}

void BatchQueue::close() {
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
    }
    not_full_.notify_all();
    not_empty_.notify_all();
}

} // namespace ringvec
