#include "trendvote/pipeline.hpp"

#include "trendvote/error.hpp"
#include "trendvote/log.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iostream>
#include <mutex>
#include <thread>

namespace trendvote {

std::string_view to_string(MethodKind kind) {
    switch (kind) {
        case MethodKind::Standard: return "standard";
        case MethodKind::Voting: return "voting";
        case MethodKind::DTV: return "dtv";
    }
    return "?";
}

MethodKind parse_method_kind(std::string_view text) {
    const auto lower = to_lower(text);
    if (lower == "standard") return MethodKind::Standard;
    if (lower == "voting") return MethodKind::Voting;
    if (lower == "dtv" || lower == "denoising-then-voting") return MethodKind::DTV;
    throw ParseError("unknown method '" + std::string(text) + "'");
}

LabelSet label_set_for(MethodKind kind) {
    return kind == MethodKind::DTV ? LabelSet::Ternary : LabelSet::Binary;
}

std::string_view to_string(ErrorPolicy policy) {
    switch (policy) {
        case ErrorPolicy::Abort: return "abort";
        case ErrorPolicy::MarkIrrelevant: return "irrelevant";
        case ErrorPolicy::Drop: return "drop";
    }
    return "?";
}

ErrorPolicy parse_error_policy(std::string_view text) {
    const auto lower = to_lower(text);
    if (lower == "abort") return ErrorPolicy::Abort;
    if (lower == "irrelevant" || lower == "mark-irrelevant") return ErrorPolicy::MarkIrrelevant;
    if (lower == "drop") return ErrorPolicy::Drop;
    throw ParseError("unknown error policy '" + std::string(text) + "'");
}

void MethodConfig::validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
    if (max_news < 1) throw ConfigError("max_news must be at least 1");
    if (kind == MethodKind::Standard && !token_budget) throw ConfigError("standard method needs a token budget");
    if (!(temperature >= 0.0 && temperature <= 2.0)) throw ConfigError("temperature must lie in [0, 2]");
    if (input_variant.uses_article() && input_variant.tokens < 1) {
        throw ConfigError("article input variants need a positive token count");
    }
}

VoteTally tally(std::span<const ItemLabel> labels) {
    VoteTally t;
    for (ItemLabel l : labels) {
        switch (l) {
            case ItemLabel::Up: ++t.n_up; break;
            case ItemLabel::Down: ++t.n_down; break;
            case ItemLabel::Irrelevant: ++t.n_irrelevant; break;
        }
    }
    return t;
}

VoteOutcome vote(const VoteTally& t, double lambda, TrendLabel fallback) {
    const std::size_t relevant = t.n_up + t.n_down;
    if (relevant == 0) return {fallback, true};
    // n_down / relevant > lambda, kept in one division so equal ratios compare equal.
    const double ratio = static_cast<double>(t.n_down) / static_cast<double>(relevant);
    return {ratio > lambda ? TrendLabel::Down : TrendLabel::Up, false};
}

namespace {

Summarizer summarizer_for(Classifier& backend, const Tokenizer& tok) {
    return [&backend, &tok](std::string_view article, std::size_t n) {
        return summarize(article, n, &backend, tok);
    };
}

// nullopt means the item is dropped.
std::optional<ItemLabel> classify_item(const NewsItem& item, const MethodConfig& cfg, const PromptAssets& prompts,
                                       Classifier& backend, const Tokenizer& tok) {
    const LabelSet set = label_set_for(cfg.kind);
    try {
        const auto summarizer = summarizer_for(backend, tok);
        const auto query = extract_input(item, cfg.input_variant, tok, &summarizer);
        ClassifierRequest request;
        request.model_id = cfg.model_id;
        request.temperature = cfg.temperature;
        request.prompt = render_item_prompt(prompts.tmpl, prompts.exemplars, query, set).text;
        request.label_set = set;
        request.query = query;
        request.item_id = item.id;
        const auto response = backend.classify(request);
        if (!contains(set, response.label)) {
            throw BackendError("backend returned out-of-set label " + std::string(to_string(response.label)));
        }
        return response.label;
    } catch (const BackendError& e) {
        switch (cfg.error_policy) {
            case ErrorPolicy::Abort: throw;
            case ErrorPolicy::MarkIrrelevant:
                log::warn("item " + item.id + " counted as Irrelevant after backend error: " + e.what());
                return ItemLabel::Irrelevant;
            case ErrorPolicy::Drop:
                log::warn("item " + item.id + " dropped after backend error: " + e.what());
                return std::nullopt;
        }
        throw;
    }
}

DayPrediction assemble_votes(const PredictionInstance& instance, const MethodConfig& cfg,
                             std::vector<ItemVote> votes) {
    DayPrediction day;
    day.target_date = instance.target_date;
    day.method = cfg.kind;
    day.truth = instance.truth;
    day.news_used = instance.news.size();
    std::vector<ItemLabel> labels;
    labels.reserve(votes.size());
    for (const auto& v : votes) labels.push_back(v.label);
    day.tally = tally(labels);
    day.item_labels = std::move(votes);
    const auto outcome = vote(day.tally, cfg.lambda, cfg.fallback);
    day.final = outcome.label;
    day.fallback_used = outcome.fallback_used;
    return day;
}

// Runs fn(i) for i in [0, n) on up to `workers` threads; the first exception
// stops further work and is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            threads.emplace_back([&] {
                while (!stop.load()) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= n) return;
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        stop = true;
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<ItemVote> predict_per_item(const PredictionInstance& instance, const MethodConfig& cfg,
                                       const PromptAssets& prompts, Classifier& backend, const Tokenizer& tok) {
    if (cfg.kind == MethodKind::Standard) throw ConfigError("per-item prediction needs the voting or dtv method");
    const auto sampled = sample_news(instance, cfg.max_news, cfg.seed);
    std::vector<ItemVote> votes;
    votes.reserve(sampled.news.size());
    for (const auto& item : sampled.news) {
        if (auto label = classify_item(item, cfg, prompts, backend, tok)) votes.push_back({item.id, *label});
    }
    return votes;
}

DayPrediction predict_standard(const PredictionInstance& instance, const MethodConfig& cfg,
                               const PromptAssets& prompts, Classifier& backend, const Tokenizer& tok) {
    if (cfg.kind != MethodKind::Standard) throw ConfigError("predict_standard needs the standard method");
    if (!cfg.token_budget) throw ConfigError("standard method needs a token budget");
    const auto sampled = sample_news(instance, cfg.max_news, cfg.seed);

    const auto summarizer = summarizer_for(backend, tok);
    std::vector<std::string> texts;
    texts.reserve(sampled.news.size());
    for (const auto& item : sampled.news) texts.push_back(extract_input(item, cfg.input_variant, tok, &summarizer));
    const auto prompt = render_standard_prompt(prompts.tmpl, prompts.exemplars, texts, *cfg.token_budget, tok);

    DayPrediction day;
    day.target_date = instance.target_date;
    day.method = MethodKind::Standard;
    day.truth = instance.truth;
    day.news_used = prompt.retained;

    ItemLabel label = ItemLabel::Irrelevant;
    try {
        ClassifierRequest request;
        request.model_id = cfg.model_id;
        request.temperature = cfg.temperature;
        request.prompt = prompt.spec.text;
        request.label_set = LabelSet::Binary;
        request.query = prompt.spec.query;
        label = backend.classify(request).label;
        if (label == ItemLabel::Irrelevant) throw BackendError("backend returned Irrelevant for a binary prompt");
    } catch (const BackendError& e) {
        if (cfg.error_policy == ErrorPolicy::Abort) throw;
        log::warn("day " + format_date(instance.target_date) + " falls back after backend error: " + e.what());
        label = ItemLabel::Irrelevant;
    }
    const ItemLabel labels[] = {label};
    day.tally = tally(labels);
    const auto outcome = vote(day.tally, 0.5, cfg.fallback);
    day.final = outcome.label;
    day.fallback_used = outcome.fallback_used;
    return day;
}

std::vector<DayPrediction> run_method(const DatasetSplit& split, const MethodConfig& cfg,
                                      const PromptAssets& prompts, Classifier& backend, const Tokenizer& tok) {
    return run_method(std::span<const PredictionInstance>(split.instances), cfg, prompts, backend, tok);
}

std::vector<DayPrediction> run_method(std::span<const PredictionInstance> instances, const MethodConfig& cfg,
                                      const PromptAssets& prompts, Classifier& backend, const Tokenizer& tok) {
    cfg.validate();
    std::vector<const PredictionInstance*> ordered;
    for (const auto& inst : instances) ordered.push_back(&inst);
    std::stable_sort(ordered.begin(), ordered.end(), [](const PredictionInstance* a, const PredictionInstance* b) {
        return a->target_date < b->target_date;
    });

    std::vector<DayPrediction> out(ordered.size());
    if (cfg.kind == MethodKind::Standard) {
        parallel_for(ordered.size(), cfg.workers,
                     [&](std::size_t i) { out[i] = predict_standard(*ordered[i], cfg, prompts, backend, tok); });
        return out;
    }

    std::vector<PredictionInstance> sampled;
    sampled.reserve(ordered.size());
    for (const auto* inst : ordered) sampled.push_back(sample_news(*inst, cfg.max_news, cfg.seed));

    struct Task {
        std::size_t day;
        std::size_t item;
    };
    std::vector<Task> tasks;
    std::vector<std::vector<std::optional<ItemLabel>>> labels(sampled.size());
    for (std::size_t d = 0; d < sampled.size(); ++d) {
        labels[d].resize(sampled[d].news.size());
        for (std::size_t i = 0; i < sampled[d].news.size(); ++i) tasks.push_back({d, i});
    }
    parallel_for(tasks.size(), cfg.workers, [&](std::size_t t) {
        const auto [d, i] = tasks[t];
        labels[d][i] = classify_item(sampled[d].news[i], cfg, prompts, backend, tok);
    });

    std::size_t fallbacks = 0;
    for (std::size_t d = 0; d < sampled.size(); ++d) {
        std::vector<ItemVote> votes;
        for (std::size_t i = 0; i < sampled[d].news.size(); ++i) {
            if (labels[d][i]) votes.push_back({sampled[d].news[i].id, *labels[d][i]});
        }
        out[d] = assemble_votes(sampled[d], cfg, std::move(votes));
        fallbacks += out[d].fallback_used ? 1 : 0;
    }
    if (fallbacks > 0) {
        log::info(std::to_string(fallbacks) + " of " + std::to_string(out.size()) +
                  " days had no Up/Down votes and used the fallback label");
    }
    return out;
}

std::vector<DayPrediction> apply_lambda(std::span<const DayPrediction> predictions, double lambda) {
    std::vector<DayPrediction> out(predictions.begin(), predictions.end());
    for (auto& day : out) {
        if (day.fallback_used) continue;
        day.final = vote(day.tally, lambda, day.final).label;
    }
    return out;
}

std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    for (int k = 1; k <= 19; ++k) grid.push_back(k / 20.0);
    return grid;
}

double accuracy(std::span<const DayPrediction> predictions) {
    if (predictions.empty()) return 0.0;
    std::size_t correct = 0;
    for (const auto& day : predictions) correct += day.final == day.truth ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

LambdaSweep sweep_lambda(std::span<const DayPrediction> predictions, std::span<const double> grid) {
    if (grid.empty()) throw ValidationError("lambda grid is empty");
    for (const auto& day : predictions) {
        if (day.method == MethodKind::Standard) {
            throw ValidationError("standard predictions carry no vote tallies to re-threshold");
        }
    }
    LambdaSweep sweep;
    bool have_best = false;
    for (double lambda : grid) {
        if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("lambda grid values must lie in [0, 1]");
        std::size_t correct = 0;
        for (const auto& day : predictions) {
            const TrendLabel label = day.fallback_used ? day.final : vote(day.tally, lambda, day.final).label;
            correct += label == day.truth ? 1 : 0;
        }
        const double acc = predictions.empty() ? 0.0
                                               : static_cast<double>(correct) / static_cast<double>(predictions.size());
        sweep.table.emplace_back(lambda, acc);

        const auto closer = [](double a, double b) {
            const double da = std::abs(a - 0.5);
            const double db = std::abs(b - 0.5);
            return da < db || (da == db && a < b);
        };
        if (!have_best || acc > sweep.best_accuracy ||
            (acc == sweep.best_accuracy && closer(lambda, sweep.best_lambda))) {
            sweep.best_lambda = lambda;
            sweep.best_accuracy = acc;
            have_best = true;
        }
    }
    return sweep;
}

void write_predictions(std::ostream& out, std::span<const DayPrediction> predictions) {
    for (const auto& day : predictions) {
        nlohmann::ordered_json j;
        j["date"] = format_date(day.target_date);
        j["method"] = to_string(day.method);
        j["final"] = to_string(day.final);
        j["truth"] = to_string(day.truth);
        j["n_up"] = day.tally.n_up;
        j["n_down"] = day.tally.n_down;
        j["n_irrelevant"] = day.tally.n_irrelevant;
        j["fallback_used"] = day.fallback_used;
        j["news_used"] = day.news_used;
        auto items = nlohmann::ordered_json::array();
        for (const auto& v : day.item_labels) items.push_back({v.news_id, to_string(v.label)});
        j["items"] = std::move(items);
        out << j.dump() << '\n';
    }
}

std::vector<DayPrediction> read_predictions(std::istream& in) {
    std::vector<DayPrediction> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            DayPrediction day;
            day.target_date = parse_date(j.at("date").get<std::string>());
            day.method = parse_method_kind(j.at("method").get<std::string>());
            day.final = parse_trend_label(j.at("final").get<std::string>());
            day.truth = parse_trend_label(j.at("truth").get<std::string>());
            day.tally = {j.at("n_up").get<std::size_t>(), j.at("n_down").get<std::size_t>(),
                         j.at("n_irrelevant").get<std::size_t>()};
            day.fallback_used = j.at("fallback_used").get<bool>();
            day.news_used = j.value("news_used", std::size_t{0});
            for (const auto& pair : j.at("items")) {
                day.item_labels.push_back({pair.at(0).get<std::string>(), parse_item_label(pair.at(1).get<std::string>())});
            }
            out.push_back(std::move(day));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("malformed prediction record: ") + e.what(), line_no);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return out;
}

}  // namespace trendvote
