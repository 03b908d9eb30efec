#pragma once

#include "trendvote/date.hpp"
#include "trendvote/labels.hpp"
#include "trendvote/pipeline.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace trendvote {

struct DatedLabel {
    Date date;
    TrendLabel label = TrendLabel::Up;
};

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
    TrendLabel positive_class = TrendLabel::Up;

    std::size_t total() const { return tp + fp + tn + fn; }
};

// Throws ValidationError on empty input, unequal lengths, or dates that do
// not line up position by position.
ConfusionCounts confusion(std::span<const DatedLabel> preds, std::span<const DatedLabel> truths,
                          TrendLabel positive_class = TrendLabel::Up);
ConfusionCounts confusion(std::span<const TrendLabel> preds, std::span<const TrendLabel> truths,
                          TrendLabel positive_class = TrendLabel::Up);
ConfusionCounts confusion(std::span<const DayPrediction> predictions, TrendLabel positive_class = TrendLabel::Up);

struct MetricsRow {
    double acc = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t n_days = 0;
    double fallback_rate = 0.0;
    TrendLabel positive_class = TrendLabel::Up;
    // Set when the metric's denominator was zero and it was reported as 0.
    bool precision_undefined = false;
    bool recall_undefined = false;
};

MetricsRow metrics(const ConfusionCounts& c, double fallback_rate = 0.0);
MetricsRow evaluate(std::span<const DayPrediction> predictions, TrendLabel positive_class = TrendLabel::Up);

struct SignificanceResult {
    double t_statistic = 0.0;
    double p_value = 1.0;
    std::size_t n_pairs = 0;
    // Zero variance of the differences: all-zero gives t=0, p=1; a constant
    // non-zero difference gives t=±inf, p=0.
    bool degenerate = false;
};

// Two-sided paired t-test with n-1 degrees of freedom; needs n >= 2.
SignificanceResult paired_ttest(std::span<const double> a, std::span<const double> b);

// Per-day correctness indicators (1 correct, 0 wrong).
std::vector<double> correctness(std::span<const DayPrediction> predictions);

// Paired test on per-day correctness. Throws ValidationError unless both
// runs cover the same dates in the same order.
SignificanceResult compare_runs(std::span<const DayPrediction> a, std::span<const DayPrediction> b);

}  // namespace trendvote
