#include "trendvote/cli.hpp"

#include "trendvote/cache.hpp"
#include "trendvote/error.hpp"
#include "trendvote/evaluation.hpp"
#include "trendvote/lexicon.hpp"
#include "trendvote/log.hpp"
#include "trendvote/remote.hpp"
#include "trendvote/report.hpp"
#include "trendvote/synthlab.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>

namespace trendvote::cli {

namespace {

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
    return buf;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

const DatasetSplit& pick_split(const SplitResult& splits, SplitName name) {
    return splits.get(name);
}

std::vector<DayPrediction> predict(const RunConfig& cfg, const MethodConfig& method, const DatasetSplit& split,
                                   Classifier& backend) {
    const auto prompts = make_prompts(cfg, method);
    return run_method(split, method, prompts, backend);
}

std::filesystem::path write_prediction_file(const std::filesystem::path& path,
                                            const std::vector<DayPrediction>& predictions) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    write_predictions(out, predictions);
    return path;
}

std::vector<DayPrediction> read_prediction_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open prediction file " + path.string());
    return read_predictions(in);
}

nlohmann::ordered_json method_echo(const RunConfig& cfg, const MethodConfig& m, SplitName split) {
    auto j = cfg.echo();
    j["effective.method"] = to_string(m.kind);
    j["effective.split"] = to_string(split);
    j["effective.shots_per_class"] = m.shots_per_class;
    j["effective.lambda"] = m.lambda;
    j["effective.max_news"] = m.max_news;
    j["effective.variant"] = to_string(m.input_variant);
    j["effective.backend"] = to_string(cfg.backend);
    return j;
}

void log_cache_stats(const Classifier& backend) {
    if (const auto* cached = dynamic_cast<const CachedClassifier*>(&backend)) {
        log::info("cache: " + std::to_string(cached->hits()) + " hits, " + std::to_string(cached->misses()) +
                  " misses");
    }
}

}  // namespace

SplitResult load_dataset(const RunConfig& cfg) {
    if (!cfg.news_path) throw ConfigError("data.news is not set");
    if (!cfg.prices_path) throw ConfigError("data.prices is not set");
    if (!cfg.spans) throw ConfigError("splits.train/valid/test are not set");
    auto news = ingest_news(*cfg.news_path);
    if (cfg.ticker) news = filter_by_ticker(news, *cfg.ticker);
    const auto prices = ingest_prices(*cfg.prices_path);
    const auto built = build_instances(news, prices);
    if (built.dropped_empty > 0) {
        log::info(std::to_string(built.dropped_empty) + " labeled days had no news and were dropped");
    }
    auto splits = split_dataset(built.instances, *cfg.spans);
    if (splits.excluded > 0) {
        log::info(std::to_string(splits.excluded) + " instances fall outside every split span");
    }
    return splits;
}

std::shared_ptr<Classifier> make_backend(const RunConfig& cfg) {
    std::shared_ptr<Classifier> inner;
    switch (cfg.backend) {
        case BackendKind::Lexicon:
            if (!cfg.lexicon_path) throw ConfigError("lexicon backend needs backend.lexicon");
            inner = std::make_shared<LexiconClassifier>(Lexicon::load(*cfg.lexicon_path));
            break;
        case BackendKind::Oracle: {
            if (!cfg.truth_path) throw ConfigError("oracle backend needs backend.truth");
            const auto truth = synth::load_truth(*cfg.truth_path);
            inner = std::make_shared<synth::OracleClassifier>(truth, cfg.relevance_error, cfg.direction_error,
                                                              cfg.oracle_seed);
            break;
        }
        case BackendKind::Remote:
            inner = std::make_shared<RemoteClassifier>(cfg.remote);
            break;
        case BackendKind::Replay:
            if (!cfg.cache_path) throw ConfigError("replay backend needs backend.cache");
            break;
    }
    if (!cfg.cache_path) return inner;
    auto cache = std::make_shared<ResponseCache>(*cfg.cache_path);
    return std::make_shared<CachedClassifier>(std::move(inner), std::move(cache), cfg.remote.summary_model_id);
}

PromptAssets make_prompts(const RunConfig& cfg, const MethodConfig& method) {
    PromptAssets assets;
    const bool standard = method.kind == MethodKind::Standard;
    const auto& tmpl_path = standard && cfg.standard_template ? cfg.standard_template : cfg.item_template;
    if (tmpl_path) assets.tmpl = PromptTemplate::load(*tmpl_path);

    const std::optional<std::filesystem::path>* pool_path = &cfg.pool_ternary;
    const char* pool_key = "prompts.pool_ternary";
    if (method.kind == MethodKind::Standard) {
        pool_path = &cfg.pool_standard;
        pool_key = "prompts.pool_standard";
    } else if (method.kind == MethodKind::Voting) {
        pool_path = &cfg.pool_binary;
        pool_key = "prompts.pool_binary";
    }
    if (!*pool_path) {
        if (method.shots_per_class > 0) {
            throw ConfigError(std::string(pool_key) + " is needed for " + std::to_string(method.shots_per_class) +
                              " shots per class");
        }
        return assets;
    }
    const auto pool = load_exemplar_pool(**pool_path);
    try {
        assets.exemplars = select_exemplars(pool, method.shots_per_class, label_set_for(method.kind), method.seed);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(pool_key) + " (" + (*pool_path)->string() + ") for the " +
                          std::string(to_string(method.kind)) + " method: " + e.what());
    }
    return assets;
}

void cmd_ingest(const RunConfig& cfg, std::ostream& out) {
    const auto splits = load_dataset(cfg);
    out << "split  span                    days     Up   Down\n";
    for (SplitName name : {SplitName::Train, SplitName::Valid, SplitName::Test}) {
        const auto& split = splits.get(name);
        std::size_t up = 0;
        for (const auto& inst : split.instances) up += inst.truth == TrendLabel::Up ? 1 : 0;
        const std::size_t n = split.instances.size();
        const double up_share = n ? static_cast<double>(up) / static_cast<double>(n) : 0.0;
        out << std::left << std::setw(6) << to_string(name) << ' ' << std::setw(22)
            << (split.span.empty() ? std::string("(empty)") : format_span(split.span)) << ' ' << std::right
            << std::setw(5) << n << ' ' << std::setw(6) << (n ? pct(up_share) : "-") << ' ' << std::setw(6)
            << (n ? pct(1.0 - up_share) : "-") << '\n';
    }
    out << "excluded: " << splits.excluded << '\n';
}

std::filesystem::path cmd_predict(const RunConfig& cfg, std::ostream& out) {
    const auto splits = load_dataset(cfg);
    const auto& split = pick_split(splits, cfg.split);
    auto backend = make_backend(cfg);
    const auto predictions = predict(cfg, cfg.method, split, *backend);
    log_cache_stats(*backend);

    const auto path = cfg.out_dir / ("predictions_" + std::string(to_string(cfg.method.kind)) + "_" +
                                     std::string(to_string(cfg.split)) + ".jsonl");
    write_prediction_file(path, predictions);
    out << "wrote " << path.string() << " (" << predictions.size() << " days)\n";
    if (!predictions.empty()) {
        const auto m = evaluate(predictions, cfg.positive_class);
        out << to_string(cfg.method.kind) << " on " << to_string(cfg.split) << ": acc " << pct(m.acc) << ", P "
            << pct(m.precision) << ", R " << pct(m.recall) << ", F1 " << pct(m.f1) << " (positive "
            << to_string(m.positive_class) << "), fallback " << pct(m.fallback_rate) << '\n';
    }
    return path;
}

SweepAxis parse_sweep_axis(std::string_view text) {
    if (text == "lambda") return SweepAxis::Lambda;
    if (text == "shots") return SweepAxis::Shots;
    if (text == "news_count") return SweepAxis::NewsCount;
    if (text == "variant") return SweepAxis::Variant;
    throw ConfigError("unknown sweep axis '" + std::string(text) + "'");
}

std::filesystem::path cmd_sweep(const RunConfig& cfg, SweepAxis axis, std::ostream& out) {
    const auto splits = load_dataset(cfg);
    auto backend = make_backend(cfg);

    std::vector<RunSummary> runs;
    std::vector<SeriesPoint> series;
    std::string stem;
    const auto add_point = [&](const std::string& x, const MethodConfig& m, SplitName split,
                               const std::vector<DayPrediction>& preds) {
        if (preds.empty()) throw ValidationError("split " + std::string(to_string(split)) + " has no days");
        const auto metrics = evaluate(preds, cfg.positive_class);
        runs.push_back({stem + "=" + x, method_echo(cfg, m, split), metrics, {}});
        series.push_back({x, metrics});
    };

    if (axis == SweepAxis::Lambda) {
        stem = "lambda";
        if (cfg.method.kind == MethodKind::Standard) {
            throw ConfigError("the lambda sweep needs the voting or dtv method");
        }
        const SplitName split = cfg.split_set ? cfg.split : SplitName::Valid;
        const auto preds = predict(cfg, cfg.method, pick_split(splits, split), *backend);
        const auto sweep = sweep_lambda(preds, cfg.lambda_grid);
        for (const auto& [lambda, acc] : sweep.table) {
            MethodConfig m = cfg.method;
            m.lambda = lambda;
            add_point(num(lambda), m, split, apply_lambda(preds, lambda));
        }
        out << "best lambda " << num(sweep.best_lambda) << " (acc " << pct(sweep.best_accuracy) << " on "
            << to_string(split) << ")\n";
    } else {
        const SplitName split = cfg.split_set ? cfg.split : SplitName::Test;
        const auto& data = pick_split(splits, split);
        if (axis == SweepAxis::Shots) {
            stem = "shots";
            const std::size_t classes = labels_of(label_set_for(cfg.method.kind)).size();
            for (std::size_t total : cfg.shots_grid) {
                if (total % classes != 0) {
                    throw ConfigError(std::to_string(total) + "-shot does not split evenly over " +
                                      std::to_string(classes) + " classes");
                }
                MethodConfig m = cfg.method;
                m.shots_per_class = total / classes;
                add_point(std::to_string(total), m, split, predict(cfg, m, data, *backend));
            }
        } else if (axis == SweepAxis::NewsCount) {
            stem = "news_count";
            for (std::size_t n : cfg.news_counts) {
                MethodConfig m = cfg.method;
                m.max_news = n;
                add_point(std::to_string(n), m, split, predict(cfg, m, data, *backend));
            }
        } else {
            stem = "variant";
            for (const auto& v : cfg.variants) {
                MethodConfig m = cfg.method;
                m.input_variant = v;
                add_point(to_string(v), m, split, predict(cfg, m, data, *backend));
            }
        }
    }
    log_cache_stats(*backend);

    const auto files = report(runs, cfg.out_dir, "sweep_" + stem + "_" + std::string(to_string(cfg.method.kind)),
                              series);
    write_table(out, runs);
    out << "series: " << files.series->string() << '\n';
    return *files.series;
}

void cmd_eval(const RunConfig& cfg, const std::vector<std::filesystem::path>& files, std::ostream& out) {
    if (files.empty()) throw ConfigError("eval needs at least one prediction file");
    std::vector<std::vector<DayPrediction>> runs_data;
    std::vector<RunSummary> runs;
    for (const auto& path : files) {
        auto preds = read_prediction_file(path);
        if (preds.empty()) throw ValidationError(path.string() + " holds no predictions");
        nlohmann::ordered_json echo;
        echo["file"] = path.string();
        echo["method"] = to_string(preds.front().method);
        runs.push_back({path.stem().string(), echo, evaluate(preds, cfg.positive_class), {}});
        runs_data.push_back(std::move(preds));
    }
    for (std::size_t i = 0; i < runs.size(); ++i) {
        for (std::size_t j = i + 1; j < runs.size(); ++j) {
            try {
                runs[i].significance.push_back({runs[j].name, compare_runs(runs_data[i], runs_data[j])});
            } catch (const ValidationError& e) {
                log::warn("skipping t-test " + runs[i].name + " vs " + runs[j].name + ": " + e.what());
            }
        }
    }
    const auto written = report(runs, cfg.out_dir, "eval");
    write_table(out, runs);
    out << "results: " << written.results.string() << '\n';
}

synth::SynthFiles cmd_synth(const RunConfig& cfg, std::ostream& out) {
    const auto corpus = synth::generate(cfg.synth);
    const auto dir = cfg.synth_out ? *cfg.synth_out : cfg.out_dir;
    const auto files = synth::write_corpus(corpus, dir);
    std::size_t relevant = 0;
    for (const auto& rec : corpus.truth) relevant += rec.truth.relevant ? 1 : 0;
    out << "wrote " << corpus.days.size() << " days, " << corpus.news.size() << " items (" << relevant
        << " relevant) to " << dir.string() << '\n';
    return files;
}

namespace {

struct CommonOptions {
    std::optional<std::string> config;
    std::vector<std::pair<std::string, std::string>> overrides;
};

void add_flag(CLI::App* sub, CommonOptions& opts, const std::string& flag, const std::string& key,
              const std::string& help) {
    sub->add_option_function<std::string>(
        flag, [&opts, key](const std::string& v) { opts.overrides.emplace_back(key, v); }, help);
}

void add_common(CLI::App* sub, CommonOptions& opts) {
    sub->add_option("--config", opts.config, "Run configuration file");
    add_flag(sub, opts, "--method", "method.kind", "standard | voting | dtv");
    add_flag(sub, opts, "--split", "run.split", "train | valid | test");
    add_flag(sub, opts, "--lambda", "method.lambda", "Down-vote threshold");
    add_flag(sub, opts, "--shots", "method.shots_per_class", "Exemplars per class");
    add_flag(sub, opts, "--max-news", "method.max_news", "News items per day");
    add_flag(sub, opts, "--variant", "method.variant", "title | article-first-N | ...");
    add_flag(sub, opts, "--backend", "backend.kind", "remote | lexicon | oracle | replay");
    add_flag(sub, opts, "--cache", "backend.cache", "Response cache file");
    add_flag(sub, opts, "--seed", "method.seed", "Sampling seed");
    add_flag(sub, opts, "--out", "output.dir", "Output directory");
    sub->allow_extras();
}

// Leftover "--section.key value" / "--section.key=value" pairs.
void collect_dotted(const std::vector<std::string>& extras, CommonOptions& opts) {
    for (std::size_t i = 0; i < extras.size(); ++i) {
        const auto& arg = extras[i];
        if (!arg.starts_with("--") || arg.find('.') == std::string::npos) {
            throw CLI::ExtrasError({arg});
        }
        const auto body = arg.substr(2);
        if (const auto eq = body.find('='); eq != std::string::npos) {
            opts.overrides.emplace_back(body.substr(0, eq), body.substr(eq + 1));
        } else if (i + 1 < extras.size()) {
            opts.overrides.emplace_back(body, extras[++i]);
        } else {
            throw CLI::ArgumentMismatch(arg + " needs a value");
        }
    }
}

}  // namespace

int run(int argc, const char* const argv[], std::ostream& out, std::ostream& err) {
    CLI::App app{"News-driven stock trend prediction with denoising-then-voting"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    CommonOptions opts;
    auto* ingest = app.add_subcommand("ingest", "Validate data and print per-split day counts");
    auto* predict_cmd = app.add_subcommand("predict", "Run one method over a split and write predictions");
    auto* sweep = app.add_subcommand("sweep", "Run a method over a grid and write series files");
    auto* eval = app.add_subcommand("eval", "Score prediction files and compare them pairwise");
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus with planted truth");
    for (auto* sub : {ingest, predict_cmd, sweep, eval, synth_cmd}) add_common(sub, opts);

    std::string axis;
    sweep->add_option("--axis", axis, "lambda | shots | news_count | variant")
        ->required()
        ->check(CLI::IsMember({"lambda", "shots", "news_count", "variant"}));
    std::vector<std::string> files;
    eval->add_option("files", files, "Prediction files");
    std::optional<std::string> positive;
    eval->add_option("--positive", positive, "Positive class for P/R/F1 (up | down)");

    try {
        app.parse(argc, argv);
        for (auto* sub : app.get_subcommands()) collect_dotted(sub->remaining(), opts);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
        return kUsage;
    }
    if (eval->parsed() && files.empty()) {
        err << "usage error: eval needs at least one prediction file\n";
        return kUsage;
    }
    if (positive) opts.overrides.emplace_back("output.positive_class", *positive);

    try {
        const auto cfg = load_run_config(opts.config ? std::optional<std::filesystem::path>(*opts.config)
                                                     : std::nullopt,
                                         opts.overrides);
        if (ingest->parsed()) {
            cmd_ingest(cfg, out);
        } else if (predict_cmd->parsed()) {
            cmd_predict(cfg, out);
        } else if (sweep->parsed()) {
            cmd_sweep(cfg, parse_sweep_axis(axis), out);
        } else if (eval->parsed()) {
            std::vector<std::filesystem::path> paths(files.begin(), files.end());
            cmd_eval(cfg, paths, out);
        } else if (synth_cmd->parsed()) {
            cmd_synth(cfg, out);
        }
    } catch (const BackendError& e) {
        err << "run aborted: " << e.what() << '\n';
        return kAborted;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        err << "run aborted: " << e.what() << '\n';
        return kAborted;
    }
    return kOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("trendvote");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace trendvote::cli
