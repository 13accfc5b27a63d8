#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ringvec/traffic.hpp"

namespace ringvec {

// Full run configuration. Every field has a config-file key and a CLI flag
// twin of the same name.
struct TrainConfig {
    int dim = 128;                    // embedding dimension d
    int window = 5;                   // nominal window W
    int negatives = 5;                // N per context window
    int epochs = 20;
    float alpha0 = 0.025f;            // initial learning rate
    double subsample = 1e-4;          // frequent-word threshold t; <= 0 disables
    uint64_t min_count = 5;
    uint64_t batch_sentences = 10000; // S sentences per batch
    uint64_t max_sentence_len = 1000;
    int workers = 0;                  // 0 = hardware concurrency
    uint64_t seed = 1;
    ReuseMode reuse_mode = ReuseMode::lifetime;
    double table_power = 0.75;
    uint64_t table_size = 10'000'000;
    uint64_t queue_capacity = 0;      // 0 = 2 * workers
    bool ignore_delimiters = true;

    // Fixed context half-width W_f = ceil(W / 2).
    int context_width() const { return (window + 1) / 2; }

    bool operator==(const TrainConfig&) const = default;
};

std::string to_string(ReuseMode mode);
ReuseMode reuse_mode_from_string(const std::string& name);

// Applies "key value" to a config; throws unknown_key / bad_config on bad
// input. Numeric values accept '_' as a digit separator.
void apply_config_value(TrainConfig& config, const std::string& key, const std::string& value);

// Flat key/value document: one "key = value" per line, '#' comments.
TrainConfig parse_config(const std::string& text);
TrainConfig parse_config_file(const std::string& path);
std::string write_config(const TrainConfig& config);

// Hard validation errors throw bad_config; returns soft warnings (values
// outside the usual hyperparameter ranges run anyway).
std::vector<std::string> validate_config(const TrainConfig& config);

// Resolves workers/queue_capacity defaults against the machine.
TrainConfig resolve_config(const TrainConfig& config);

struct EpochStats {
    int epoch = 0;
    uint64_t words = 0;
    double seconds = 0.0;
    double words_per_sec = 0.0;
};

// Machine-readable run summary; config echo round-trips to an identical
// TrainConfig.
struct RunReport {
    TrainConfig config;
    std::vector<EpochStats> epochs;
    double batching_words_per_sec = 0.0;
    TrafficCounters traffic;            // merged instrumented counters
    TrafficCounters analytic;           // per-sentence closed forms, accumulated
    uint64_t words_trained = 0;
    uint64_t sentences_trained = 0;
    uint64_t vocab_size = 0;
    double wall_seconds = 0.0;
};

void write_report(const RunReport& report, const std::string& path);
RunReport read_report(const std::string& path);

// Numeric parsing helpers shared with the CLI ('_' separators allowed).
int64_t parse_int(const std::string& text);
uint64_t parse_uint(const std::string& text);
double parse_real(const std::string& text);

} // namespace ringvec
