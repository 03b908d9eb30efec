#include "trendvote/synthlab.hpp"

#include "trendvote/error.hpp"
#include "trendvote/pipeline.hpp"
#include "trendvote/rng.hpp"
#include "trendvote/tokenizer.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace trendvote::synth {

namespace {

// Each directional phrase carries exactly one keyword from the matching list.
constexpr std::array<std::string_view, 6> kUpPhrases = {
    "shares rebound on strong demand",      "stocks surge after upbeat outlook",
    "index climbs toward record territory", "profits beat analyst forecasts",
    "traders cheer quarterly results",      "outlook upgrade lifts sentiment",
};
constexpr std::array<std::string_view, 6> kUpKeywords = {"rebound", "surge", "climbs", "beat", "cheer", "upgrade"};

constexpr std::array<std::string_view, 6> kDownPhrases = {
    "shares slump on soft demand",          "stocks plunge after gloomy outlook",
    "index tumbles toward yearly territory", "profits miss analyst forecasts",
    "traders fear quarterly results",       "outlook downgrade weighs on sentiment",
};
constexpr std::array<std::string_view, 6> kDownKeywords = {"slump", "plunge", "tumbles", "miss", "fear", "downgrade"};

constexpr std::array<std::string_view, 8> kMarketSubjects = {
    "Wall Street:",   "Bank sector:",     "Tech giants:",  "Energy producers:",
    "Retail chains:", "Industrial firms:", "Chipmakers:",  "Blue chips:",
};

constexpr std::array<std::string_view, 8> kNoiseSubjects = {
    "Celebrity chef:",  "Island resort:",   "Film festival:",   "Football club:",
    "Fashion week:",    "Museum exhibit:",  "Pop star tour:",   "Wine harvest:",
};

constexpr std::array<std::string_view, 10> kFiller = {
    "Officials described the week as busy across the region.",
    "Several people familiar with the matter spoke on condition of anonymity.",
    "The announcement came late in the afternoon local time.",
    "Observers said further details would follow in coming days.",
    "A spokesperson declined to comment beyond the prepared statement.",
    "Attendance figures were compiled from several independent sources.",
    "Local media covered the event throughout the evening.",
    "The report was published alongside a short summary of methods.",
    "Organizers thanked volunteers and partners for their support.",
    "Questions from reporters focused mainly on the schedule.",
};

template <std::size_t N>
std::string_view pick(const std::array<std::string_view, N>& pool, std::mt19937_64& rng) {
    return pool[uniform_below(rng, N)];
}

std::string item_id(std::size_t day, std::size_t item) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "syn-%06zu-%03zu", day, item);
    return buf;
}

}  // namespace

void SynthConfig::validate() const {
    if (n_days < 1) throw ConfigError("synthetic corpus needs n_days >= 1");
    if (items_per_day < 1) throw ConfigError("synthetic corpus needs items_per_day >= 1");
    for (double p : {relevance_rate, direction_accuracy, noise_direction_bias}) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("synthetic probabilities must lie in [0, 1]");
    }
}

std::size_t PlantedDay::relevant_count() const {
    std::size_t n = 0;
    for (const auto& [item, truth] : items) n += truth.relevant ? 1 : 0;
    return n;
}

SynthCorpus generate(const SynthConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(splitmix64(cfg.seed));
    SynthCorpus corpus;
    double close = 100.0;
    corpus.prices.push_back({cfg.start, close});

    for (std::size_t k = 1; k <= cfg.n_days; ++k) {
        PlantedDay day;
        day.target_date = cfg.start + std::chrono::days(static_cast<long>(k));
        const Date news_date = day.target_date - std::chrono::days(1);
        day.true_trend = bernoulli(rng, 0.5) ? TrendLabel::Up : TrendLabel::Down;

        for (std::size_t j = 0; j < cfg.items_per_day; ++j) {
            SynthItemTruth truth;
            truth.relevant = bernoulli(rng, cfg.relevance_rate);
            if (truth.relevant) {
                const bool agrees = bernoulli(rng, cfg.direction_accuracy);
                truth.planted_label = to_item_label(agrees ? day.true_trend : opposite(day.true_trend));
                truth.surface_reading = truth.planted_label;
            } else {
                truth.planted_label = ItemLabel::Irrelevant;
                truth.surface_reading = bernoulli(rng, cfg.noise_direction_bias) ? ItemLabel::Up : ItemLabel::Down;
            }
            const bool up = truth.surface_reading == ItemLabel::Up;
            std::string title(truth.relevant ? pick(kMarketSubjects, rng) : pick(kNoiseSubjects, rng));
            title += ' ';
            title += up ? pick(kUpPhrases, rng) : pick(kDownPhrases, rng);

            std::string article = title + '.';
            const std::size_t sentences = 3 + uniform_below(rng, 18);
            for (std::size_t s = 0; s < sentences; ++s) {
                article += ' ';
                article += pick(kFiller, rng);
            }

            NewsItem item{item_id(k, j), news_date, std::move(title), std::move(article), {}};
            corpus.truth.push_back({item.id, news_date, truth});
            corpus.news.push_back(item);
            day.items.emplace_back(std::move(item), truth);
        }

        if (day.true_trend == TrendLabel::Up) close += 1.0;
        corpus.prices.push_back({day.target_date, close});
        corpus.days.push_back(std::move(day));
    }
    return corpus;
}

Lexicon synth_lexicon() {
    Lexicon lex;
    for (auto word : kUpKeywords) lex.add(word, 1.0);
    for (auto word : kDownKeywords) lex.add(word, -1.0);
    return lex;
}

SynthFiles write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    SynthFiles files{dir / "news.jsonl", dir / "prices.csv", dir / "truth.jsonl"};
    const auto open = [](const std::filesystem::path& p) {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw Error("cannot write " + p.string());
        return out;
    };
    {
        auto out = open(files.news);
        write_news(out, corpus.news);
    }
    {
        auto out = open(files.prices);
        write_prices(out, corpus.prices);
    }
    {
        auto out = open(files.truth);
        write_truth(out, corpus.truth);
    }
    return files;
}

void write_truth(std::ostream& out, std::span<const TruthRecord> truth) {
    for (const auto& rec : truth) {
        nlohmann::ordered_json j;
        j["id"] = rec.id;
        j["date"] = format_date(rec.date);
        j["relevant"] = rec.truth.relevant;
        j["planted_label"] = to_string(rec.truth.planted_label);
        j["surface_reading"] = to_string(rec.truth.surface_reading);
        out << j.dump() << '\n';
    }
}

std::vector<TruthRecord> read_truth(std::istream& in) {
    std::vector<TruthRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            TruthRecord rec;
            rec.id = j.at("id").get<std::string>();
            rec.date = parse_date(j.at("date").get<std::string>());
            rec.truth.relevant = j.at("relevant").get<bool>();
            rec.truth.planted_label = parse_item_label(j.at("planted_label").get<std::string>());
            rec.truth.surface_reading = parse_item_label(j.at("surface_reading").get<std::string>());
            if (rec.truth.relevant == (rec.truth.planted_label == ItemLabel::Irrelevant)) {
                throw ParseError("planted_label must be Irrelevant exactly when relevant is false");
            }
            out.push_back(std::move(rec));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("malformed truth record: ") + e.what(), line_no);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return out;
}

std::vector<TruthRecord> load_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open truth file " + path.string());
    return read_truth(in);
}

OracleClassifier::OracleClassifier(std::span<const TruthRecord> truth, double relevance_error,
                                   double direction_error, std::uint64_t seed)
    : relevance_error_(relevance_error), direction_error_(direction_error), seed_(seed) {
    if (!(relevance_error >= 0.0 && relevance_error <= 1.0) || !(direction_error >= 0.0 && direction_error <= 1.0)) {
        throw ConfigError("oracle error rates must lie in [0, 1]");
    }
    for (const auto& rec : truth) truth_.emplace(rec.id, rec.truth);
}

ItemLabel OracleClassifier::label_for(const std::string& item_id, LabelSet label_set) const {
    const auto it = truth_.find(item_id);
    if (it == truth_.end()) throw BackendError("oracle has no truth for item '" + item_id + "'");
    const SynthItemTruth& t = it->second;

    bool relevant = t.relevant;
    if (uniform01(derive_seed(seed_, item_id, 1)) < relevance_error_) relevant = !relevant;
    if (label_set == LabelSet::Ternary && !relevant) return ItemLabel::Irrelevant;

    ItemLabel direction = t.relevant ? t.planted_label : t.surface_reading;
    if (uniform01(derive_seed(seed_, item_id, 2)) < direction_error_) direction = opposite(direction);
    return direction;
}

ClassifierResponse OracleClassifier::classify(const ClassifierRequest& request) {
    validate(request);
    if (!request.item_id) throw BackendError("oracle backend only answers per-item requests");
    ClassifierResponse response;
    response.label = label_for(*request.item_id, request.label_set);
    response.raw = std::string(to_string(response.label));
    response.source = ResponseSource::Oracle;
    return response;
}

std::string OracleClassifier::summarize_text(std::string_view article, std::size_t n_tokens) {
    return truncate_tokens(default_tokenizer(), article, n_tokens);
}

VoteAccuracy expected_vote_accuracy_given(std::size_t m_relevant, double q, double lambda, TrendLabel truth) {
    if (m_relevant == 0) throw ValidationError("expected vote accuracy needs at least one relevant item");
    if (!(q >= 0.0 && q <= 1.0) || !(lambda >= 0.0 && lambda <= 1.0)) {
        throw ValidationError("q and lambda must lie in [0, 1]");
    }
    const std::size_t m = m_relevant;
    // Largest Down count that still votes Up; the rule is monotone in it.
    std::size_t up_until = 0;
    bool any_up = false;
    for (std::size_t d = 0; d <= m; ++d) {
        if (vote({m - d, d, 0}, lambda, TrendLabel::Up).label == TrendLabel::Up) {
            up_until = d;
            any_up = true;
        }
    }
    // Down votes arrive with probability 1-q on Up days and q on Down days.
    const double p_down = truth == TrendLabel::Up ? 1.0 - q : q;

    double p_up_vote = 0.0;  // P(D <= up_until)
    VoteAccuracy out;
    if (!any_up) {
        p_up_vote = 0.0;
    } else if (m <= kExactEnumerationLimit || p_down == 0.0 || p_down == 1.0) {
        double coef = 1.0;  // C(m, d)
        for (std::size_t d = 0; d <= up_until; ++d) {
            p_up_vote += coef * std::pow(p_down, static_cast<double>(d)) *
                         std::pow(1.0 - p_down, static_cast<double>(m - d));
            coef = coef * static_cast<double>(m - d) / static_cast<double>(d + 1);
        }
    } else {
        out.approximate = true;
        const double mean = static_cast<double>(m) * p_down;
        const double sd = std::sqrt(static_cast<double>(m) * p_down * (1.0 - p_down));
        const double z = (static_cast<double>(up_until) + 0.5 - mean) / sd;
        p_up_vote = 0.5 * std::erfc(-z / std::sqrt(2.0));
    }
    p_up_vote = std::min(1.0, std::max(0.0, p_up_vote));
    out.probability = truth == TrendLabel::Up ? p_up_vote : 1.0 - p_up_vote;
    return out;
}

VoteAccuracy expected_vote_accuracy(std::size_t m_relevant, double q, double lambda) {
    const auto up = expected_vote_accuracy_given(m_relevant, q, lambda, TrendLabel::Up);
    const auto down = expected_vote_accuracy_given(m_relevant, q, lambda, TrendLabel::Down);
    return {0.5 * (up.probability + down.probability), up.approximate || down.approximate};
}

double predicted_dtv_accuracy(std::span<const PlantedDay> days, double q, double lambda, TrendLabel fallback) {
    if (days.empty()) return 0.0;
    double total = 0.0;
    for (const auto& day : days) {
        const std::size_t m = day.relevant_count();
        if (m == 0) {
            total += day.true_trend == fallback ? 1.0 : 0.0;
        } else {
            total += expected_vote_accuracy_given(m, q, lambda, day.true_trend).probability;
        }
    }
    return total / static_cast<double>(days.size());
}

}  // namespace trendvote::synth
