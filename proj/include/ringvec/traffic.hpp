#pragma once

#include <cstdint>
#include <string>

namespace ringvec {

// Context-word caching policy during training.
//   lifetime: ring buffer keeps each sentence position cached from its first
//             window to its last (one model read + one write-back each).
//   window:   context vectors are fetched and written back once per window.
//   none:     every pairing goes straight to model memory.
//   window_snapshot: diagnostic variant of lifetime where all pairings in a
//             window are computed against window-entry values.
enum class ReuseMode { lifetime, window, none, window_snapshot };

// Model-memory access counts, denominated in whole d-length vector accesses.
// ring_hits counts context pairings served from a cache instead of a read.
struct TrafficCounters {
    uint64_t context_reads = 0;
    uint64_t context_writes = 0;
    uint64_t sample_reads = 0;
    uint64_t sample_writes = 0;
    uint64_t ring_hits = 0;

    TrafficCounters& operator+=(const TrafficCounters& other) {
        context_reads += other.context_reads;
        context_writes += other.context_writes;
        sample_reads += other.sample_reads;
        sample_writes += other.sample_writes;
        ring_hits += other.ring_hits;
        return *this;
    }

    uint64_t total_model_accesses() const {
        return context_reads + context_writes + sample_reads + sample_writes;
    }

    bool operator==(const TrafficCounters&) const = default;
};

// Exact expected counts for one sentence of length L. Every (sample, context)
// pairing is served either by a model read or by a cache hit, so for any mode
// ring_hits + context_reads == (N+1) * pairings.
TrafficCounters analytic_traffic(size_t sentence_length, int context_width,
                                 int negatives, ReuseMode mode);

// Aggregate estimate from corpus totals, assuming every sentence is longer
// than the full window span; deviates from the exact per-sentence sum only
// through short-sentence boundary effects.
TrafficCounters analytic_traffic_corpus(uint64_t words, uint64_t sentences,
                                        int context_width, int negatives, ReuseMode mode);

// The context-word global-access reduction from lifetime caching:
// 2*W_f / (2*W_f + 1).
double reuse_reduction_statistic(int context_width);

// Aligned per-category comparison of instrumented vs analytic counts with
// relative deviations, plus the reduction statistic for the given width.
std::string traffic_report(const TrafficCounters& instrumented,
                           const TrafficCounters& analytic,
                           int context_width);

} // namespace ringvec
