#include "ringvec/traffic.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>

#include "ringvec/error.hpp"

namespace ringvec {

namespace {

uint64_t pairings_for_length(uint64_t length, uint64_t context_width) {
    if (length < 2) return 0;
    uint64_t g = std::min(context_width, length - 1);
    return 2 * g * length - g * (g + 1);
}

} // namespace

TrafficCounters analytic_traffic(size_t sentence_length, int context_width,
                                 int negatives, ReuseMode mode) {
    if (sentence_length < 1) raise(ErrorCode::bad_argument, "sentence length must be >= 1");
    if (context_width < 1) raise(ErrorCode::bad_argument, "context width must be >= 1");
    if (negatives < 0) raise(ErrorCode::bad_argument, "negatives must be >= 0");

    uint64_t len = sentence_length;
    uint64_t pairs = pairings_for_length(len, static_cast<uint64_t>(context_width));
    uint64_t samples = static_cast<uint64_t>(negatives) + 1;
    // Every target of a sentence with L >= 2 has at least one context word.
    uint64_t windows = len >= 2 ? len : 0;

    TrafficCounters t;
    switch (mode) {
    case ReuseMode::lifetime:
    case ReuseMode::window_snapshot:
        t.context_reads = len;
        t.context_writes = len;
        t.sample_reads = windows * samples;
        t.sample_writes = windows * samples;
        t.ring_hits = windows > 0 ? samples * pairs - len : 0;
        break;
    case ReuseMode::window:
        t.context_reads = pairs;
        t.context_writes = pairs;
        t.sample_reads = windows * samples;
        t.sample_writes = windows * samples;
        t.ring_hits = static_cast<uint64_t>(negatives) * pairs;
        break;
    case ReuseMode::none:
        t.context_reads = samples * pairs;
        t.context_writes = samples * pairs;
        t.sample_reads = samples * pairs;
        t.sample_writes = samples * pairs;
        t.ring_hits = 0;
        break;
    }
    return t;
}

TrafficCounters analytic_traffic_corpus(uint64_t words, uint64_t sentences,
                                        int context_width, int negatives, ReuseMode mode) {
    if (context_width < 1) raise(ErrorCode::bad_argument, "context width must be >= 1");
    if (negatives < 0) raise(ErrorCode::bad_argument, "negatives must be >= 0");

    uint64_t w = static_cast<uint64_t>(context_width);
    // All sentences assumed longer than 2*W_f + 1.
    uint64_t pairs = 2 * w * words - sentences * w * (w + 1);
    uint64_t samples = static_cast<uint64_t>(negatives) + 1;

    TrafficCounters t;
    switch (mode) {
    case ReuseMode::lifetime:
    case ReuseMode::window_snapshot:
        t.context_reads = words;
        t.context_writes = words;
        t.sample_reads = words * samples;
        t.sample_writes = words * samples;
        t.ring_hits = samples * pairs - words;
        break;
    case ReuseMode::window:
        t.context_reads = pairs;
        t.context_writes = pairs;
        t.sample_reads = words * samples;
        t.sample_writes = words * samples;
        t.ring_hits = static_cast<uint64_t>(negatives) * pairs;
        break;
    case ReuseMode::none:
        t.context_reads = samples * pairs;
        t.context_writes = samples * pairs;
        t.sample_reads = samples * pairs;
        t.sample_writes = samples * pairs;
        t.ring_hits = 0;
        break;
    }
    return t;
}

double reuse_reduction_statistic(int context_width) {
    if (context_width < 1) raise(ErrorCode::bad_argument, "context width must be >= 1");
    double two_w = 2.0 * context_width;
    return two_w / (two_w + 1.0);
}

std::string traffic_report(const TrafficCounters& instrumented,
                           const TrafficCounters& analytic,
                           int context_width) {
    struct Row {
        const char* name;
        uint64_t measured;
        uint64_t expected;
    };
    const Row rows[] = {
        {"context_reads", instrumented.context_reads, analytic.context_reads},
        {"context_writes", instrumented.context_writes, analytic.context_writes},
        {"sample_reads", instrumented.sample_reads, analytic.sample_reads},
        {"sample_writes", instrumented.sample_writes, analytic.sample_writes},
        {"ring_hits", instrumented.ring_hits, analytic.ring_hits},
    };

    std::string out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-16s %20s %20s %12s\n", "category",
                  "instrumented", "analytic", "deviation");
    out += line;
    for (const Row& r : rows) {
        double dev = 0.0;
        if (r.expected != 0) {
            dev = (static_cast<double>(r.measured) - static_cast<double>(r.expected)) /
                  static_cast<double>(r.expected);
        } else if (r.measured != 0) {
            dev = 1.0;
        }
        std::snprintf(line, sizeof(line), "%-16s %20" PRIu64 " %20" PRIu64 " %11.6f%%\n",
                      r.name, r.measured, r.expected, dev * 100.0);
        out += line;
    }
    std::snprintf(line, sizeof(line),
                  "context reuse reduction 2*Wf/(2*Wf+1) for Wf=%d: %.6f\n",
                  context_width, reuse_reduction_statistic(context_width));
    out += line;
    return out;
}

} // namespace ringvec
