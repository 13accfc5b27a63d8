#include "ringvec/config.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ringvec/error.hpp"

namespace ringvec {

namespace {

std::string strip_separators(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (c != '_') out.push_back(c);
    }
    return out;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    raise(ErrorCode::bad_config, "expected a boolean, got '" + text + "'");
}

int checked_int(const std::string& text) {
    int64_t v = parse_int(text);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        raise(ErrorCode::bad_config, "value out of range: '" + text + "'");
    }
    return static_cast<int>(v);
}

} // namespace

int64_t parse_int(const std::string& text) {
    std::string s = strip_separators(trim(text));
    int64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        raise(ErrorCode::bad_config, "expected an integer, got '" + text + "'");
    }
    return value;
}

uint64_t parse_uint(const std::string& text) {
    int64_t v = parse_int(text);
    if (v < 0) raise(ErrorCode::bad_config, "expected a non-negative integer, got '" + text + "'");
    return static_cast<uint64_t>(v);
}

double parse_real(const std::string& text) {
    std::string s = strip_separators(trim(text));
    try {
        size_t used = 0;
        double value = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return value;
    } catch (const std::exception&) {
        raise(ErrorCode::bad_config, "expected a number, got '" + text + "'");
    }
}

std::string to_string(ReuseMode mode) {
    switch (mode) {
    case ReuseMode::lifetime: return "lifetime";
    case ReuseMode::window: return "window";
    case ReuseMode::none: return "none";
    case ReuseMode::window_snapshot: return "window_snapshot";
    }
    return "lifetime";
}

ReuseMode reuse_mode_from_string(const std::string& name) {
    if (name == "lifetime") return ReuseMode::lifetime;
    if (name == "window") return ReuseMode::window;
    if (name == "none") return ReuseMode::none;
    raise(ErrorCode::bad_config, "reuse_mode must be lifetime, window or none; got '" + name + "'");
}

void apply_config_value(TrainConfig& config, const std::string& key, const std::string& value) {
    if (key == "dim") config.dim = checked_int(value);
    else if (key == "window") config.window = checked_int(value);
    else if (key == "negatives") config.negatives = checked_int(value);
    else if (key == "epochs") config.epochs = checked_int(value);
    else if (key == "alpha") config.alpha0 = static_cast<float>(parse_real(value));
    else if (key == "subsample") config.subsample = parse_real(value);
    else if (key == "min_count") config.min_count = parse_uint(value);
    else if (key == "batch_sentences") config.batch_sentences = parse_uint(value);
    else if (key == "max_sentence_len") config.max_sentence_len = parse_uint(value);
    else if (key == "workers") config.workers = checked_int(value);
    else if (key == "seed") config.seed = parse_uint(value);
    else if (key == "reuse_mode") config.reuse_mode = reuse_mode_from_string(value);
    else if (key == "table_power") config.table_power = parse_real(value);
    else if (key == "table_size") config.table_size = parse_uint(value);
    else if (key == "queue_capacity") config.queue_capacity = parse_uint(value);
    else if (key == "ignore_delimiters") config.ignore_delimiters = parse_bool(value);
    else raise(ErrorCode::unknown_key, "unknown config key '" + key + "'");
}

TrainConfig parse_config(const std::string& text) {
    TrainConfig config;
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            raise(ErrorCode::bad_config,
                  "config line " + std::to_string(line_no) + " is not 'key = value'");
        }
        apply_config_value(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return config;
}

TrainConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::io, "cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string write_config(const TrainConfig& c) {
    std::ostringstream out;
    out << "dim = " << c.dim << '\n'
        << "window = " << c.window << '\n'
        << "negatives = " << c.negatives << '\n'
        << "epochs = " << c.epochs << '\n'
        << "alpha = " << c.alpha0 << '\n'
        << "subsample = " << c.subsample << '\n'
        << "min_count = " << c.min_count << '\n'
        << "batch_sentences = " << c.batch_sentences << '\n'
        << "max_sentence_len = " << c.max_sentence_len << '\n'
        << "workers = " << c.workers << '\n'
        << "seed = " << c.seed << '\n'
        << "reuse_mode = " << to_string(c.reuse_mode) << '\n'
        << "table_power = " << c.table_power << '\n'
        << "table_size = " << c.table_size << '\n'
        << "queue_capacity = " << c.queue_capacity << '\n'
        << "ignore_delimiters = " << (c.ignore_delimiters ? "true" : "false") << '\n';
    return out.str();
}

std::vector<std::string> validate_config(const TrainConfig& c) {
    if (c.dim < 1) raise(ErrorCode::bad_config, "dim must be >= 1");
    if (c.window < 1) raise(ErrorCode::bad_config, "window must be >= 1");
    if (c.negatives < 0) raise(ErrorCode::bad_config, "negatives must be >= 0");
    if (c.epochs < 0) raise(ErrorCode::bad_config, "epochs must be >= 0");
    if (!(c.alpha0 > 0.0f)) raise(ErrorCode::bad_config, "alpha must be > 0");
    if (c.min_count < 1) raise(ErrorCode::bad_config, "min_count must be >= 1");
    if (c.batch_sentences < 1) raise(ErrorCode::bad_config, "batch_sentences must be >= 1");
    if (c.max_sentence_len < 1) raise(ErrorCode::bad_config, "max_sentence_len must be >= 1");
    if (c.workers < 0) raise(ErrorCode::bad_config, "workers must be >= 0");
    if (c.table_size < 1) raise(ErrorCode::bad_config, "table_size must be >= 1");
    if (!(c.table_power >= 0.0)) raise(ErrorCode::bad_config, "table_power must be >= 0");

    std::vector<std::string> warnings;
    if (c.window < 2 || c.window > 10) {
        warnings.push_back("window " + std::to_string(c.window) +
                           " is outside the usual range [2, 10]");
    }
    if (c.negatives < 2 || c.negatives > 20) {
        warnings.push_back("negatives " + std::to_string(c.negatives) +
                           " is outside the usual range [2, 20]");
    }
    return warnings;
}

TrainConfig resolve_config(const TrainConfig& config) {
    TrainConfig c = config;
    if (c.workers == 0) {
        unsigned hw = std::thread::hardware_concurrency();
        c.workers = hw == 0 ? 1 : static_cast<int>(hw);
    }
    if (c.queue_capacity == 0) {
        c.queue_capacity = 2 * static_cast<uint64_t>(c.workers);
    }
    return c;
}

namespace {

nlohmann::json counters_to_json(const TrafficCounters& t) {
    return nlohmann::json{
        {"context_reads", t.context_reads},
        {"context_writes", t.context_writes},
        {"sample_reads", t.sample_reads},
        {"sample_writes", t.sample_writes},
        {"ring_hits", t.ring_hits},
    };
}

TrafficCounters counters_from_json(const nlohmann::json& j) {
    TrafficCounters t;
    t.context_reads = j.at("context_reads").get<uint64_t>();
    t.context_writes = j.at("context_writes").get<uint64_t>();
    t.sample_reads = j.at("sample_reads").get<uint64_t>();
    t.sample_writes = j.at("sample_writes").get<uint64_t>();
    t.ring_hits = j.at("ring_hits").get<uint64_t>();
    return t;
}

nlohmann::json config_to_json(const TrainConfig& c) {
    return nlohmann::json{
        {"dim", c.dim},
        {"window", c.window},
        {"negatives", c.negatives},
        {"epochs", c.epochs},
        {"alpha", c.alpha0},
        {"subsample", c.subsample},
        {"min_count", c.min_count},
        {"batch_sentences", c.batch_sentences},
        {"max_sentence_len", c.max_sentence_len},
        {"workers", c.workers},
        {"seed", c.seed},
        {"reuse_mode", to_string(c.reuse_mode)},
        {"table_power", c.table_power},
        {"table_size", c.table_size},
        {"queue_capacity", c.queue_capacity},
        {"ignore_delimiters", c.ignore_delimiters},
    };
}

TrainConfig config_from_json(const nlohmann::json& j) {
    TrainConfig c;
    c.dim = j.at("dim").get<int>();
    c.window = j.at("window").get<int>();
    c.negatives = j.at("negatives").get<int>();
    c.epochs = j.at("epochs").get<int>();
    c.alpha0 = j.at("alpha").get<float>();
    c.subsample = j.at("subsample").get<double>();
    c.min_count = j.at("min_count").get<uint64_t>();
    c.batch_sentences = j.at("batch_sentences").get<uint64_t>();
    c.max_sentence_len = j.at("max_sentence_len").get<uint64_t>();
    c.workers = j.at("workers").get<int>();
    c.seed = j.at("seed").get<uint64_t>();
    c.reuse_mode = reuse_mode_from_string(j.at("reuse_mode").get<std::string>());
    c.table_power = j.at("table_power").get<double>();
    c.table_size = j.at("table_size").get<uint64_t>();
    c.queue_capacity = j.at("queue_capacity").get<uint64_t>();
    c.ignore_delimiters = j.at("ignore_delimiters").get<bool>();
    return c;
}

} // namespace

void write_report(const RunReport& report, const std::string& path) {
    nlohmann::json j;
    j["config"] = config_to_json(report.config);
    j["epochs"] = nlohmann::json::array();
    for (const EpochStats& e : report.epochs) {
        j["epochs"].push_back({
            {"epoch", e.epoch},
            {"words", e.words},
            {"seconds", e.seconds},
            {"words_per_sec", e.words_per_sec},
        });
    }
    j["batching_words_per_sec"] = report.batching_words_per_sec;
    j["traffic"] = counters_to_json(report.traffic);
    j["analytic_traffic"] = counters_to_json(report.analytic);
    j["words_trained"] = report.words_trained;
    j["sentences_trained"] = report.sentences_trained;
    j["vocab_size"] = report.vocab_size;
    j["wall_seconds"] = report.wall_seconds;

    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::io, "cannot open report file for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) raise(ErrorCode::io, "failed writing report file: " + path);
}

RunReport read_report(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::io, "cannot open report file: " + path);
    nlohmann::json j;
    try {
        in >> j;
        RunReport r;
        r.config = config_from_json(j.at("config"));
        for (const auto& e : j.at("epochs")) {
            EpochStats s;
            s.epoch = e.at("epoch").get<int>();
            s.words = e.at("words").get<uint64_t>();
            s.seconds = e.at("seconds").get<double>();
            s.words_per_sec = e.at("words_per_sec").get<double>();
            r.epochs.push_back(s);
        }
        r.batching_words_per_sec = j.at("batching_words_per_sec").get<double>();
        r.traffic = counters_from_json(j.at("traffic"));
        r.analytic = counters_from_json(j.at("analytic_traffic"));
        r.words_trained = j.at("words_trained").get<uint64_t>();
        r.sentences_trained = j.at("sentences_trained").get<uint64_t>();
        r.vocab_size = j.at("vocab_size").get<uint64_t>();
        r.wall_seconds = j.at("wall_seconds").get<double>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::bad_format, std::string("malformed report file: ") + e.what());
    }
}

} // namespace ringvec
