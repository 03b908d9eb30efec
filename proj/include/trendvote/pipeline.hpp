#pragma once

#include "trendvote/backend.hpp"
#include "trendvote/corpus.hpp"
#include "trendvote/prompting.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace trendvote {

enum class MethodKind { Standard, Voting, DTV };

std::string_view to_string(MethodKind kind);
MethodKind parse_method_kind(std::string_view text);

// Standard and Voting ask for {Up, Down}; DTV adds Irrelevant.
LabelSet label_set_for(MethodKind kind);

// What to do when the backend fails on one item.
enum class ErrorPolicy { Abort, MarkIrrelevant, Drop };

std::string_view to_string(ErrorPolicy policy);
ErrorPolicy parse_error_policy(std::string_view text);

inline constexpr std::size_t kDefaultTokenBudget = 4097;

struct MethodConfig {
    MethodKind kind = MethodKind::DTV;
    std::size_t shots_per_class = 3;
    double lambda = 0.5;
    std::size_t max_news = 60;
    InputVariant input_variant;
    TrendLabel fallback = TrendLabel::Up;
    std::optional<std::size_t> token_budget;  // required for Standard
    std::uint64_t seed = 0;
    ErrorPolicy error_policy = ErrorPolicy::Abort;
    std::string model_id = "gpt-3.5-turbo-0301";
    double temperature = 0.0;
    std::size_t workers = 1;

    // Throws ConfigError.
    void validate() const;
};

struct VoteTally {
    std::size_t n_up = 0;
    std::size_t n_down = 0;
    std::size_t n_irrelevant = 0;

    std::size_t total() const { return n_up + n_down + n_irrelevant; }
    bool operator==(const VoteTally&) const = default;
};

VoteTally tally(std::span<const ItemLabel> labels);

struct VoteOutcome {
    TrendLabel label = TrendLabel::Up;
    bool fallback_used = false;
};

// Down iff n_down / (n_up + n_down) > lambda. With no Up or Down votes the
// fallback is returned and flagged. Irrelevant votes never matter.
VoteOutcome vote(const VoteTally& t, double lambda, TrendLabel fallback);

struct ItemVote {
    std::string news_id;
    ItemLabel label = ItemLabel::Irrelevant;
};

struct DayPrediction {
    Date target_date;
    MethodKind method = MethodKind::DTV;
    std::vector<ItemVote> item_labels;  // empty for Standard
    VoteTally tally;
    TrendLabel final = TrendLabel::Up;
    TrendLabel truth = TrendLabel::Up;
    bool fallback_used = false;
    std::size_t news_used = 0;  // items sent to the model (Standard: titles kept after truncation)
};

// Template plus the exemplars already chosen for it.
struct PromptAssets {
    PromptTemplate tmpl = PromptTemplate::builtin();
    std::vector<Exemplar> exemplars;
};

std::vector<ItemVote> predict_per_item(const PredictionInstance& instance, const MethodConfig& cfg,
                                       const PromptAssets& prompts, Classifier& backend,
                                       const Tokenizer& tok = default_tokenizer());

DayPrediction predict_standard(const PredictionInstance& instance, const MethodConfig& cfg,
                               const PromptAssets& prompts, Classifier& backend,
                               const Tokenizer& tok = default_tokenizer());

// One prediction per instance in target_date order. Classification calls
// run on cfg.workers threads; results are joined by position, so
// completion order never affects the output.
std::vector<DayPrediction> run_method(const DatasetSplit& split, const MethodConfig& cfg,
                                      const PromptAssets& prompts, Classifier& backend,
                                      const Tokenizer& tok = default_tokenizer());

std::vector<DayPrediction> run_method(std::span<const PredictionInstance> instances, const MethodConfig& cfg,
                                      const PromptAssets& prompts, Classifier& backend,
                                      const Tokenizer& tok = default_tokenizer());

// Re-thresholds stored tallies. Days that used the fallback keep it.
std::vector<DayPrediction> apply_lambda(std::span<const DayPrediction> predictions, double lambda);

struct LambdaSweep {
    double best_lambda = 0.5;
    double best_accuracy = 0.0;
    std::vector<std::pair<double, double>> table;  // (lambda, accuracy) in grid order
};

// {0.05, 0.10, ..., 0.95}
std::vector<double> default_lambda_grid();

// Highest accuracy wins; ties go to the lambda nearest 0.5, then the smaller.
// Throws ValidationError for Standard predictions or an empty grid.
LambdaSweep sweep_lambda(std::span<const DayPrediction> predictions, std::span<const double> grid);

double accuracy(std::span<const DayPrediction> predictions);

// JSON Lines, one day per line, fixed field order.
void write_predictions(std::ostream& out, std::span<const DayPrediction> predictions);
std::vector<DayPrediction> read_predictions(std::istream& in);

}  // namespace trendvote
