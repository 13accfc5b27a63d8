#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ringvec/config.hpp"
#include "ringvec/corpus.hpp"
#include "ringvec/error.hpp"
#include "ringvec/eval.hpp"
#include "ringvec/model.hpp"
#include "ringvec/trainer.hpp"

namespace {

using namespace ringvec;

// Numeric flags accept '_' as a digit separator (e.g. --batch-sentences 10_000).
const CLI::Validator kNumeric{
    [](std::string& s) {
        s.erase(std::remove(s.begin(), s.end(), '_'), s.end());
        return std::string{};
    },
    "NUMERIC"};

void add_train_flags(CLI::App* cmd, TrainConfig& config) {
    cmd->add_option("--dim", config.dim, "embedding dimension")->transform(kNumeric);
    cmd->add_option("--window", config.window, "nominal window W (context width is ceil(W/2))")
        ->transform(kNumeric);
    cmd->add_option("--negatives", config.negatives, "negative samples per window")
        ->transform(kNumeric);
    cmd->add_option("--epochs", config.epochs, "training passes")->transform(kNumeric);
    cmd->add_option("--alpha", config.alpha0, "initial learning rate")->transform(kNumeric);
    cmd->add_option("--subsample", config.subsample, "frequent-word threshold t; 0 disables")
        ->transform(kNumeric);
    cmd->add_option("--min-count", config.min_count, "discard tokens seen fewer times")
        ->transform(kNumeric);
    cmd->add_option("--batch-sentences", config.batch_sentences, "sentences per batch (S)")
        ->transform(kNumeric);
    cmd->add_option("--max-sentence-len", config.max_sentence_len, "sentence cut length")
        ->transform(kNumeric);
    cmd->add_option("--workers", config.workers, "worker threads (0 = all cores)")
        ->transform(kNumeric);
    cmd->add_option("--seed", config.seed, "rng seed")->transform(kNumeric);
    cmd->add_option_function<std::string>(
           "--reuse-mode,--reuse",
           [&config](const std::string& v) { config.reuse_mode = reuse_mode_from_string(v); },
           "context reuse mode: lifetime | window | none")
        ->type_name("MODE");
    cmd->add_option("--table-power", config.table_power, "negative table exponent")
        ->transform(kNumeric);
    cmd->add_option("--table-size", config.table_size, "negative table slots")
        ->transform(kNumeric);
    cmd->add_option("--queue-capacity", config.queue_capacity,
                    "batch queue bound (0 = 2*workers)")
        ->transform(kNumeric);
    cmd->add_flag("--ignore-delimiters,!--honor-delimiters", config.ignore_delimiters,
                  "newlines do not end sentences (default on)");
}

// The --config file provides defaults; flags parsed afterwards overwrite them.
std::string find_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return "";
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_train(const std::string& corpus_path, const TrainConfig& config,
              const std::string& out_path, const std::string& vocab_path,
              const std::string& report_path) {
    TrainConfig cfg = resolve_config(config);
    print_warnings(validate_config(cfg));

    std::fprintf(stderr, "ingesting %s\n", corpus_path.c_str());
    Corpus corpus = ingest_file(corpus_path, cfg.min_count, cfg.max_sentence_len,
                                cfg.ignore_delimiters);
    std::fprintf(stderr,
                 "vocab=%d tokens/epoch=%llu sentences=%zu raw_tokens=%llu distinct=%llu\n",
                 corpus.vocab.size(),
                 static_cast<unsigned long long>(corpus.vocab.total_retained_tokens()),
                 corpus.sentences.size(), static_cast<unsigned long long>(corpus.raw_tokens),
                 static_cast<unsigned long long>(corpus.distinct_raw_tokens));

    TrainResult result = train(corpus, cfg, nullptr, [&](const EpochStats& e) {
        std::fprintf(stderr, "epoch %d/%d words=%llu words/s=%.6f\n", e.epoch + 1, cfg.epochs,
                     static_cast<unsigned long long>(e.words), e.words_per_sec);
    });
    std::fprintf(stderr, "batching words/s=%.6f wall=%.6fs\n",
                 result.report.batching_words_per_sec, result.report.wall_seconds);

    if (!vocab_path.empty()) corpus.vocab.save(vocab_path);
    save_embeddings(result.model, corpus.vocab, out_path, MatrixKind::input);
    if (!report_path.empty()) write_report(result.report, report_path);
    return 0;
}

int cmd_eval_sim(const std::string& emb_path, const std::string& benchmark_path) {
    LoadedEmbeddings emb = load_embeddings(emb_path);
    auto benchmark = load_similarity_benchmark(benchmark_path);
    SimilarityResult r = eval_similarity(emb, benchmark);
    std::printf("rho=%.6f used=%zu skipped=%zu\n", r.rho, r.pairs_used, r.pairs_skipped);
    return 0;
}

int cmd_eval_analogy(const std::string& emb_path, const std::string& analogy_path,
                     const std::string& method_name, int threads) {
    LoadedEmbeddings emb = load_embeddings(emb_path);
    auto quads = load_analogy_set(analogy_path);
    AnalogyMethod method;
    if (method_name == "add") {
        method = AnalogyMethod::cos_add;
    } else if (method_name == "mul") {
        method = AnalogyMethod::cos_mul;
    } else {
        raise(ErrorCode::bad_argument, "--method must be add or mul");
    }
    AnalogyResult r = eval_analogy(emb, quads, method, threads);
    std::printf("accuracy=%.6f evaluated=%zu skipped=%zu\n", r.accuracy, r.evaluated, r.skipped);
    return 0;
}

int cmd_traffic(const std::string& corpus_path, const TrainConfig& config) {
    TrainConfig cfg = resolve_config(config);
    cfg.epochs = 1;
    print_warnings(validate_config(cfg));

    Corpus corpus = ingest_file(corpus_path, cfg.min_count, cfg.max_sentence_len,
                                cfg.ignore_delimiters);
    TrainResult result = train(corpus, cfg);

    std::printf("mode=%s words=%llu sentences=%llu\n", to_string(cfg.reuse_mode).c_str(),
                static_cast<unsigned long long>(result.report.words_trained),
                static_cast<unsigned long long>(result.report.sentences_trained));
    std::printf("instrumented vs per-sentence analytic:\n%s",
                traffic_report(result.report.traffic, result.report.analytic,
                               cfg.context_width())
                    .c_str());
    TrafficCounters aggregate = analytic_traffic_corpus(
        result.report.words_trained, result.report.sentences_trained, cfg.context_width(),
        cfg.negatives, cfg.reuse_mode);
    std::printf("instrumented vs aggregate estimate:\n%s",
                traffic_report(result.report.traffic, aggregate, cfg.context_width()).c_str());
    TrafficCounters lifetime_est = analytic_traffic_corpus(
        result.report.words_trained, result.report.sentences_trained, cfg.context_width(),
        cfg.negatives, ReuseMode::lifetime);
    TrafficCounters window_est = analytic_traffic_corpus(
        result.report.words_trained, result.report.sentences_trained, cfg.context_width(),
        cfg.negatives, ReuseMode::window);
    std::printf("analytic context_reads ratio lifetime/window: %.6f (window/lifetime: %.6f)\n",
                static_cast<double>(lifetime_est.context_reads) /
                    static_cast<double>(window_est.context_reads),
                static_cast<double>(window_est.context_reads) /
                    static_cast<double>(lifetime_est.context_reads));
    return 0;
}

int cmd_nn(const std::string& emb_path, const std::string& word, int k) {
    LoadedEmbeddings emb = load_embeddings(emb_path);
    for (const Neighbor& n : nearest_neighbors(emb, word, k)) {
        std::printf("%s %.6f\n", n.token.c_str(), n.cosine);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"SGNS word embedding trainer with lifetime context-word reuse"};
    app.require_subcommand(1);

    TrainConfig config;
    std::string config_path_opt; // registered so --config shows in help
    std::string corpus_path, out_path, vocab_path, report_path;
    std::string emb_path, benchmark_path, analogy_path, word;
    std::string method = "add";
    int k = 10;
    int threads = 1;

    try {
        std::string config_path = find_config_path(argc, argv);
        if (!config_path.empty()) config = parse_config_file(config_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    CLI::App* train_cmd = app.add_subcommand("train", "train embeddings on a corpus");
    train_cmd->add_option("corpus", corpus_path, "plain-text corpus file")->required();
    train_cmd->add_option("--config", config_path_opt, "key = value config file; flags override");
    add_train_flags(train_cmd, config);
    train_cmd->add_option("--out", out_path, "output embedding text file")->required();
    train_cmd->add_option("--save-vocab", vocab_path, "write token<TAB>count vocabulary");
    train_cmd->add_option("--report", report_path, "write machine-readable run report (JSON)");

    CLI::App* sim_cmd = app.add_subcommand("eval-sim", "word-similarity Spearman correlation");
    sim_cmd->add_option("embeddings", emb_path, "embedding text file")->required();
    sim_cmd->add_option("benchmark", benchmark_path, "word1<TAB>word2<TAB>score lines")
        ->required();

    CLI::App* ana_cmd = app.add_subcommand("eval-analogy", "analogy accuracy");
    ana_cmd->add_option("embeddings", emb_path, "embedding text file")->required();
    ana_cmd->add_option("analogies", analogy_path, "'a a* b b*' lines")->required();
    ana_cmd->add_option("--method", method, "add | mul")->capture_default_str();
    ana_cmd->add_option("--threads", threads, "worker threads for scoring")->transform(kNumeric);

    CLI::App* traffic_cmd =
        app.add_subcommand("traffic", "run one epoch and print the traffic report");
    traffic_cmd->add_option("corpus", corpus_path, "plain-text corpus file")->required();
    traffic_cmd->add_option("--config", config_path_opt,
                            "key = value config file; flags override");
    add_train_flags(traffic_cmd, config);

    CLI::App* nn_cmd = app.add_subcommand("nn", "nearest neighbors by cosine");
    nn_cmd->add_option("embeddings", emb_path, "embedding text file")->required();
    nn_cmd->add_option("word", word, "query word")->required();
    nn_cmd->add_option("-k", k, "neighbor count")->capture_default_str()->transform(kNumeric);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << "\n";
        return 2;
    }

    try {
        if (train_cmd->parsed()) {
            return cmd_train(corpus_path, config, out_path, vocab_path, report_path);
        }
        if (sim_cmd->parsed()) return cmd_eval_sim(emb_path, benchmark_path);
        if (ana_cmd->parsed()) return cmd_eval_analogy(emb_path, analogy_path, method, threads);
        if (traffic_cmd->parsed()) return cmd_traffic(corpus_path, config);
        if (nn_cmd->parsed()) return cmd_nn(emb_path, word, k);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
