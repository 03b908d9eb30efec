#pragma once

#include "trendvote/backend.hpp"
#include "trendvote/corpus.hpp"
#include "trendvote/lexicon.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace trendvote::synth {

struct SynthConfig {
    std::size_t n_days = 250;
    std::size_t items_per_day = 20;
    double relevance_rate = 0.5;        // P(item is relevant)
    double direction_accuracy = 0.8;    // P(relevant item's label matches the day trend)
    double noise_direction_bias = 0.5;  // P(noise item reads as Up)
    std::uint64_t seed = 0;
    Date start = parse_date("2020-01-01");

    // Throws ConfigError.
    void validate() const;
};

struct SynthItemTruth {
    bool relevant = false;
    ItemLabel planted_label = ItemLabel::Irrelevant;
    ItemLabel surface_reading = ItemLabel::Up;  // direction the text reads as
};

struct PlantedDay {
    Date target_date;
    TrendLabel true_trend = TrendLabel::Up;
    std::vector<std::pair<NewsItem, SynthItemTruth>> items;

    std::size_t relevant_count() const;
};

// Truth file record, one per generated news item.
struct TruthRecord {
    std::string id;
    Date date;
    SynthItemTruth truth;
};

struct SynthCorpus {
    std::vector<PlantedDay> days;
    std::vector<NewsItem> news;
    std::vector<PriceBar> prices;
    std::vector<TruthRecord> truth;
};

// Day k (1-based) trades on start + k with news dated start + k - 1; the
// close rises by 1 on Up days and stays flat on Down days, so derived labels
// reproduce the planted trend. All randomness comes from cfg.seed.
SynthCorpus generate(const SynthConfig& cfg);

// Keyword rules that recover every generated item's surface reading.
Lexicon synth_lexicon();

struct SynthFiles {
    std::filesystem::path news;
    std::filesystem::path prices;
    std::filesystem::path truth;
};

SynthFiles write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir);

void write_truth(std::ostream& out, std::span<const TruthRecord> truth);
std::vector<TruthRecord> read_truth(std::istream& in);
std::vector<TruthRecord> load_truth(const std::filesystem::path& path);

// Returns planted labels, corrupted per item with probability
// relevance_error (relevance flag) and direction_error (Up/Down swap),
// each draw derived from (seed, item id). Binary requests cannot abstain, so
// noise items answer with their surface reading. Summaries are the first
// n tokens of the article.
class OracleClassifier final : public Classifier {
public:
    OracleClassifier(std::span<const TruthRecord> truth, double relevance_error, double direction_error,
                     std::uint64_t seed);

    ClassifierResponse classify(const ClassifierRequest& request) override;

    ItemLabel label_for(const std::string& item_id, LabelSet label_set) const;

    bool can_summarize() const override { return true; }
    std::string summarize_text(std::string_view article, std::size_t n_tokens) override;

private:
    std::unordered_map<std::string, SynthItemTruth> truth_;
    double relevance_error_;
    double direction_error_;
    std::uint64_t seed_;
};

struct VoteAccuracy {
    double probability = 0.0;
    bool approximate = false;  // normal approximation was used
};

inline constexpr std::size_t kExactEnumerationLimit = 30;

// P(vote matches truth | truth) when m_relevant independent voters each
// report the true direction with probability q.
VoteAccuracy expected_vote_accuracy_given(std::size_t m_relevant, double q, double lambda, TrendLabel truth);

// Average of the two conditional accuracies under a fair-coin trend prior.
VoteAccuracy expected_vote_accuracy(std::size_t m_relevant, double q, double lambda);

// Day-by-day expectation for DTV with an error-free 3-class oracle: each
// day's realized relevant count and trend, fallback days scored exactly.
double predicted_dtv_accuracy(std::span<const PlantedDay> days, double q, double lambda, TrendLabel fallback);

}  // namespace trendvote::synth
