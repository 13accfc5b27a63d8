#include "ringvec/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "ringvec/error.hpp"

namespace ringvec {

namespace {

inline bool is_ascii_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' || c == '\r';
}

// Incremental UTF-8 validator over the raw byte stream.
class Utf8Checker {
public:
    void feed(unsigned char c) {
        if (remaining_ == 0) {
            if (c < 0x80) return;
            if ((c & 0xE0) == 0xC0) {
                if (c < 0xC2) fail(); // overlong 2-byte form
                remaining_ = 1;
            } else if ((c & 0xF0) == 0xE0) {
                remaining_ = 2;
                first_ = c;
            } else if ((c & 0xF8) == 0xF0) {
                if (c > 0xF4) fail(); // beyond U+10FFFF
                remaining_ = 3;
                first_ = c;
            } else {
                fail();
            }
            seen_ = 1;
        } else {
            if ((c & 0xC0) != 0x80) fail();
            if (seen_ == 1) {
                if (first_ == 0xE0 && c < 0xA0) fail(); // overlong 3-byte
                if (first_ == 0xED && c >= 0xA0) fail(); // surrogate range
                if (first_ == 0xF0 && c < 0x90) fail(); // overlong 4-byte
                if (first_ == 0xF4 && c >= 0x90) fail(); // beyond U+10FFFF
            }
            --remaining_;
            ++seen_;
        }
    }

    void finish() const {
        if (remaining_ != 0) fail();
    }

private:
    [[noreturn]] static void fail() {
        raise(ErrorCode::invalid_utf8, "invalid UTF-8 byte sequence in input");
    }

    int remaining_ = 0;
    int seen_ = 0;
    unsigned char first_ = 0;
};

// Buffered token scanner shared by counting and encoding passes.
class TokenScanner {
public:
    explicit TokenScanner(std::istream& in) : in_(in) {}

    // Returns false at end of stream. newline_before reports whether the
    // whitespace run preceding this token contained a '\n'.
    bool next(std::string& token, bool& newline_before) {
        token.clear();
        newline_before = newline_pending_;
        for (;;) {
            if (pos_ == len_ && !refill()) break;
            unsigned char c = buf_[pos_];
            if (is_ascii_space(c)) {
                if (!token.empty()) {
                    newline_pending_ = (c == '\n');
                    ++pos_;
                    return true;
                }
                if (c == '\n') newline_before = true;
                ++pos_;
                continue;
            }
            utf8_.feed(c);
            token.push_back(static_cast<char>(c));
            ++pos_;
        }
        utf8_.finish();
        newline_pending_ = false;
        return !token.empty();
    }

private:
    bool refill() {
        in_.read(buf_, sizeof(buf_));
        len_ = static_cast<size_t>(in_.gcount());
        pos_ = 0;
        if (in_.bad()) raise(ErrorCode::io, "I/O failure while reading corpus stream");
        return len_ > 0;
    }

    std::istream& in_;
    Utf8Checker utf8_;
    char buf_[1 << 16];
    size_t pos_ = 0;
    size_t len_ = 0;
    bool newline_pending_ = false;
};

} // namespace

Vocabulary Vocabulary::build(const std::unordered_map<std::string, uint64_t>& counts,
                             uint64_t min_count) {
    if (min_count < 1) raise(ErrorCode::bad_argument, "min_count must be >= 1");

    Vocabulary v;
    v.entries_.reserve(counts.size());
    for (const auto& [token, count] : counts) {
        if (count >= min_count) v.entries_.push_back({token, count});
    }
    if (v.entries_.empty()) {
        raise(ErrorCode::empty_vocab, "no token meets min_count; nothing to train");
    }
    std::sort(v.entries_.begin(), v.entries_.end(), [](const VocabEntry& a, const VocabEntry& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.token < b.token;
    });
    v.index_.reserve(v.entries_.size());
    for (size_t i = 0; i < v.entries_.size(); ++i) {
        v.index_.emplace(v.entries_[i].token, static_cast<int32_t>(i));
        v.total_retained_ += v.entries_[i].count;
    }
    return v;
}

void Vocabulary::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::io, "cannot open vocabulary file for writing: " + path);
    for (const auto& e : entries_) {
        out << e.token << '\t' << e.count << '\n';
    }
    if (!out) raise(ErrorCode::io, "failed writing vocabulary file: " + path);
}

TokenCounts tokenize_and_count(std::istream& in) {
    TokenCounts result;
    TokenScanner scanner(in);
    std::string token;
    bool newline = false;
    while (scanner.next(token, newline)) {
        ++result.counts[token];
        ++result.total_tokens;
    }
    return result;
}

struct SentenceReader::Impl {
    Impl(std::istream& in, const Vocabulary& vocab, size_t max_len, bool ignore_delims)
        : scanner(in), vocab(vocab), max_len(max_len), ignore_delims(ignore_delims) {}

    TokenScanner scanner;
    const Vocabulary& vocab;
    size_t max_len;
    bool ignore_delims;
    std::string pending_token;
    bool pending_newline = false;
    bool have_pending = false;
    bool eof = false;

    bool next(EncodedSentence& out) {
        while (!eof || have_pending) {
            out.ids.clear();
            size_t raw = 0;
            // Build one raw chunk: tokens up to max_len, or up to the next
            // newline when delimiters are honored.
            for (;;) {
                if (!have_pending) {
                    if (eof || !scanner.next(pending_token, pending_newline)) {
                        eof = true;
                        break;
                    }
                    have_pending = true;
                }
                if (!ignore_delims && pending_newline && raw > 0) break;
                ++raw;
                int32_t id = vocab.id_of(pending_token);
                if (id >= 0) out.ids.push_back(id);
                have_pending = false;
                if (raw >= max_len) break;
            }
            if (!out.ids.empty()) return true;
            if (raw == 0) break; // nothing left in the stream
        }
        return false;
    }
};

SentenceReader::SentenceReader(std::istream& in, const Vocabulary& vocab,
                               size_t max_sentence_len, bool ignore_delimiters) {
    if (max_sentence_len < 1) raise(ErrorCode::bad_argument, "max_sentence_len must be >= 1");
    impl_ = std::make_unique<Impl>(in, vocab, max_sentence_len, ignore_delimiters);
}

SentenceReader::~SentenceReader() = default;

bool SentenceReader::next(EncodedSentence& out) {
    return impl_->next(out);
}

double subsample_keep_prob(double frequency, double threshold) {
    if (threshold <= 0.0 || frequency <= 0.0) return 1.0;
    double p = (std::sqrt(frequency / threshold) + 1.0) * (threshold / frequency);
    return p < 1.0 ? p : 1.0;
}

std::vector<double> subsample_keep_probs(const Vocabulary& vocab, double threshold) {
    if (threshold <= 0.0) return {};
    std::vector<double> probs(static_cast<size_t>(vocab.size()));
    double total = static_cast<double>(vocab.total_retained_tokens());
    for (int32_t w = 0; w < vocab.size(); ++w) {
        double f = static_cast<double>(vocab.entry(w).count) / total;
        probs[static_cast<size_t>(w)] = subsample_keep_prob(f, threshold);
    }
    return probs;
}

EncodedSentence subsample_sentence(const EncodedSentence& sentence,
                                   const std::vector<double>& keep_prob, Rng& rng) {
    if (keep_prob.empty()) return sentence;
    EncodedSentence out;
    out.ids.reserve(sentence.ids.size());
    for (int32_t id : sentence.ids) {
        if (rng.next_double() < keep_prob[static_cast<size_t>(id)]) out.ids.push_back(id);
    }
    return out;
}

uint64_t count_pairings(const std::vector<size_t>& sentence_lengths, int context_width) {
    if (context_width < 1) raise(ErrorCode::bad_argument, "context width must be >= 1");
    uint64_t total = 0;
    uint64_t w = static_cast<uint64_t>(context_width);
    for (size_t length : sentence_lengths) {
        if (length < 2) continue;
        uint64_t len = length;
        uint64_t g = std::min<uint64_t>(w, len - 1);
        // Ordered pairs at gap 1..g, both directions: 2 * sum(len - gap).
        total += 2 * g * len - g * (g + 1);
    }
    return total;
}

uint64_t Corpus::encoded_tokens() const {
    uint64_t n = 0;
    for (const auto& s : sentences) n += s.length();
    return n;
}

Corpus ingest_file(const std::string& path, uint64_t min_count,
                   size_t max_sentence_len, bool ignore_delimiters) {
    Corpus corpus;
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) raise(ErrorCode::io, "cannot open corpus file: " + path);
        TokenCounts tc = tokenize_and_count(in);
        corpus.raw_tokens = tc.total_tokens;
        corpus.distinct_raw_tokens = tc.counts.size();
        corpus.vocab = Vocabulary::build(tc.counts, min_count);
    }
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) raise(ErrorCode::io, "cannot reopen corpus file: " + path);
        SentenceReader reader(in, corpus.vocab, max_sentence_len, ignore_delimiters);
        EncodedSentence sentence;
        while (reader.next(sentence)) {
            corpus.sentences.push_back(std::move(sentence));
            sentence = EncodedSentence{};
        }
    }
    return corpus;
}

} // namespace ringvec
