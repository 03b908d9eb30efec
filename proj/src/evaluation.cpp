#include "trendvote/evaluation.hpp"

#include "trendvote/error.hpp"
#include "trendvote/stats.hpp"

#include <cmath>
#include <limits>

namespace trendvote {

namespace {

void count(ConfusionCounts& c, TrendLabel pred, TrendLabel truth) {
    const bool pred_pos = pred == c.positive_class;
    const bool truth_pos = truth == c.positive_class;
    if (pred_pos && truth_pos) ++c.tp;
    else if (pred_pos) ++c.fp;
    else if (truth_pos) ++c.fn;
    else ++c.tn;
}

}  // namespace

ConfusionCounts confusion(std::span<const DatedLabel> preds, std::span<const DatedLabel> truths,
                          TrendLabel positive_class) {
    if (preds.empty()) throw ValidationError("confusion counts need at least one day");
    if (preds.size() != truths.size()) throw ValidationError("prediction and truth sequences differ in length");
    ConfusionCounts c;
    c.positive_class = positive_class;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i].date != truths[i].date) {
            throw ValidationError("misaligned dates at position " + std::to_string(i) + ": " +
                                  format_date(preds[i].date) + " vs " + format_date(truths[i].date));
        }
        count(c, preds[i].label, truths[i].label);
    }
    return c;
}

ConfusionCounts confusion(std::span<const TrendLabel> preds, std::span<const TrendLabel> truths,
                          TrendLabel positive_class) {
    if (preds.empty()) throw ValidationError("confusion counts need at least one day");
    if (preds.size() != truths.size()) throw ValidationError("prediction and truth sequences differ in length");
    ConfusionCounts c;
    c.positive_class = positive_class;
    for (std::size_t i = 0; i < preds.size(); ++i) count(c, preds[i], truths[i]);
    return c;
}

ConfusionCounts confusion(std::span<const DayPrediction> predictions, TrendLabel positive_class) {
    if (predictions.empty()) throw ValidationError("confusion counts need at least one day");
    ConfusionCounts c;
    c.positive_class = positive_class;
    for (const auto& day : predictions) count(c, day.final, day.truth);
    return c;
}

MetricsRow metrics(const ConfusionCounts& c, double fallback_rate) {
    const std::size_t total = c.total();
    if (total == 0) throw ValidationError("metrics need at least one evaluated day");
    MetricsRow row;
    row.n_days = total;
    row.fallback_rate = fallback_rate;
    row.positive_class = c.positive_class;
    row.acc = static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
    if (c.tp + c.fp > 0) {
        row.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    } else {
        row.precision_undefined = true;
    }
    if (c.tp + c.fn > 0) {
        row.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    } else {
        row.recall_undefined = true;
    }
    if (row.precision + row.recall > 0.0) {
        row.f1 = 2.0 * row.precision * row.recall / (row.precision + row.recall);
    }
    return row;
}

MetricsRow evaluate(std::span<const DayPrediction> predictions, TrendLabel positive_class) {
    const auto c = confusion(predictions, positive_class);
    std::size_t fallbacks = 0;
    for (const auto& day : predictions) fallbacks += day.fallback_used ? 1 : 0;
    return metrics(c, static_cast<double>(fallbacks) / static_cast<double>(predictions.size()));
}

SignificanceResult paired_ttest(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ValidationError("paired t-test needs equal-length samples");
    const std::size_t n = a.size();
    if (n < 2) throw ValidationError("paired t-test needs at least two pairs");

    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dev = (a[i] - b[i]) - mean;
        ss += dev * dev;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));

    SignificanceResult result;
    result.n_pairs = n;
    if (sd == 0.0) {
        result.degenerate = true;
        if (mean == 0.0) {
            result.t_statistic = 0.0;
            result.p_value = 1.0;
        } else {
            result.t_statistic = mean > 0 ? std::numeric_limits<double>::infinity()
                                          : -std::numeric_limits<double>::infinity();
            result.p_value = 0.0;
        }
        return result;
    }
    result.t_statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
    result.p_value = stats::student_t_two_sided_p(result.t_statistic, static_cast<double>(n - 1));
    return result;
}

std::vector<double> correctness(std::span<const DayPrediction> predictions) {
    std::vector<double> out;
    out.reserve(predictions.size());
    for (const auto& day : predictions) out.push_back(day.final == day.truth ? 1.0 : 0.0);
    return out;
}

SignificanceResult compare_runs(std::span<const DayPrediction> a, std::span<const DayPrediction> b) {
    if (a.size() != b.size()) throw ValidationError("runs cover different numbers of days");
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].target_date != b[i].target_date) throw ValidationError("runs cover different days");
    }
    const auto ca = correctness(a);
    const auto cb = correctness(b);
    return paired_ttest(ca, cb);
}

}  // namespace trendvote
