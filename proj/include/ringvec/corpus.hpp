#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "ringvec/rng.hpp"

namespace ringvec {

struct VocabEntry {
    std::string token;
    uint64_t count = 0;
};

// Token <-> dense-id mapping. Ids are contiguous 0..|V|-1, assigned by count
// descending with lexicographic tie-break, so they are stable across runs.
class Vocabulary {
public:
    Vocabulary() = default;

    // Keeps tokens with count >= min_count. Throws empty_vocab if nothing
    // survives, bad_argument if min_count < 1.
    static Vocabulary build(const std::unordered_map<std::string, uint64_t>& counts,
                            uint64_t min_count);

    int32_t id_of(const std::string& token) const {
        auto it = index_.find(token);
        return it == index_.end() ? -1 : it->second;
    }
    const VocabEntry& entry(int32_t id) const { return entries_[static_cast<size_t>(id)]; }
    const std::vector<VocabEntry>& entries() const { return entries_; }
    int32_t size() const { return static_cast<int32_t>(entries_.size()); }

    // Sum of retained type counts: corpus tokens per epoch before subsampling.
    uint64_t total_retained_tokens() const { return total_retained_; }

    // One "token<TAB>count" line per entry, count-descending.
    void save(const std::string& path) const;

private:
    std::vector<VocabEntry> entries_;
    std::unordered_map<std::string, int32_t> index_;
    uint64_t total_retained_ = 0;
};

struct EncodedSentence {
    std::vector<int32_t> ids;

    size_t length() const { return ids.size(); }
    bool empty() const { return ids.empty(); }
    bool operator==(const EncodedSentence&) const = default;
};

struct TokenCounts {
    std::unordered_map<std::string, uint64_t> counts;
    uint64_t total_tokens = 0;
};

// Splits on runs of ASCII whitespace; no case folding. Rejects invalid UTF-8
// and propagates stream failures as io errors.
TokenCounts tokenize_and_count(std::istream& in);

// Streaming pass that assembles encoded sentences from a raw token stream.
// Sentence boundaries count raw tokens (out-of-vocabulary occurrences
// included); the emitted ids contain only in-vocabulary tokens and sentences
// whose retained set is empty are skipped. With ignore_delimiters set,
// newlines do not end a sentence and cuts happen only at max_sentence_len.
class SentenceReader {
public:
    SentenceReader(std::istream& in, const Vocabulary& vocab,
                   size_t max_sentence_len, bool ignore_delimiters);
    ~SentenceReader();
    SentenceReader(const SentenceReader&) = delete;
    SentenceReader& operator=(const SentenceReader&) = delete;

    // Fills `out` with the next non-empty sentence; false at end of stream.
    bool next(EncodedSentence& out);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Keep probability min(1, (sqrt(f/t)+1) * t/f) for a token of frequency f.
double subsample_keep_prob(double frequency, double threshold);

// Per-id keep probabilities for threshold t (f_w = count_w / total_retained).
// An empty vector means subsampling is disabled (t <= 0).
std::vector<double> subsample_keep_probs(const Vocabulary& vocab, double threshold);

// Independently keeps each token with its precomputed probability; survivor
// order is preserved. An empty keep_prob vector keeps everything.
EncodedSentence subsample_sentence(const EncodedSentence& sentence,
                                   const std::vector<double>& keep_prob, Rng& rng);

// Total (target, context) pairs over sentences for a fixed context width,
// windows clipped to sentence bounds.
uint64_t count_pairings(const std::vector<size_t>& sentence_lengths, int context_width);

// In-memory corpus: vocabulary plus pre-subsampling encoded sentences.
struct Corpus {
    Vocabulary vocab;
    std::vector<EncodedSentence> sentences;
    uint64_t raw_tokens = 0;
    uint64_t distinct_raw_tokens = 0;

    uint64_t encoded_tokens() const;
};

// Two passes over the file: token counting, then sentence encoding.
Corpus ingest_file(const std::string& path, uint64_t min_count,
                   size_t max_sentence_len, bool ignore_delimiters);

} // namespace ringvec
