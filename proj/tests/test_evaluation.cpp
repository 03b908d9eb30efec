#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "trendvote/error.hpp"
#include "trendvote/evaluation.hpp"
#include "trendvote/report.hpp"
#include "trendvote/stats.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace trendvote;

namespace {

const auto U = TrendLabel::Up;
const auto D = TrendLabel::Down;

// Student-t density integrated with composite Simpson's rule.
double simpson_two_sided_p(double t, double df) {
    const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * std::numbers::pi);
    const auto pdf = [&](double x) { return c * std::pow(1 + x * x / df, -(df + 1) / 2); };
    const int n = 200000;
    const double a = std::abs(t), h = 2 * a / n;
    double s = pdf(-a) + pdf(a);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * pdf(-a + i * h);
    return 1 - s * h / 3;
}

DayPrediction day(int offset, TrendLabel final, TrendLabel truth, bool fallback = false) {
    DayPrediction p;
    p.target_date = parse_date("2020-01-01") + std::chrono::days(offset);
    p.final = final;
    p.truth = truth;
    p.fallback_used = fallback;
    return p;
}

}  // namespace

TEST_CASE("confusion and metrics on the hand example") {
    const std::vector<TrendLabel> truths{U, U, D, D}, preds{U, D, D, D};
    const auto c = confusion(preds, truths, U);
    CHECK(c.tp == 1);
    CHECK(c.fn == 1);
    CHECK(c.tn == 2);
    CHECK(c.fp == 0);
    const auto m = metrics(c);
    CHECK(m.acc == 0.75);
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 0.5);
    CHECK(m.f1 == 2.0 / 3.0);
    CHECK(m.n_days == 4);
}

TEST_CASE("confusion edge cases") {
    const std::vector<TrendLabel> seq{U, D, D, U, U};
    const auto same = confusion(seq, seq);
    CHECK(same.fp == 0);
    CHECK(same.fn == 0);
    const auto all = metrics(same);
    CHECK(all.acc == 1.0);
    CHECK(all.precision == 1.0);
    CHECK(all.recall == 1.0);
    CHECK(all.f1 == 1.0);

    CHECK_THROWS_AS(confusion(std::vector<TrendLabel>{}, std::vector<TrendLabel>{}), ValidationError);
    CHECK_THROWS_AS(confusion(std::vector{U}, std::vector{U, D}), ValidationError);

    const std::vector<DatedLabel> a{{parse_date("2020-01-01"), U}, {parse_date("2020-01-02"), D}};
    const std::vector<DatedLabel> b{{parse_date("2020-01-01"), U}, {parse_date("2020-01-03"), D}};
    CHECK_THROWS_AS(confusion(a, b), ValidationError);
    CHECK(confusion(a, a).tp == 1);

    const auto none = metrics(confusion(std::vector{D, D}, std::vector{U, D}));
    CHECK(none.precision == 0.0);
    CHECK(none.precision_undefined);
    CHECK(none.f1 == 0.0);
    CHECK_FALSE(none.recall_undefined);
}

TEST_CASE("metrics agree with a brute-force recount") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 300;
        std::vector<TrendLabel> p(n), t(n);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = rng() % 2 ? U : D;
            t[i] = rng() % 2 ? U : D;
        }
        for (auto pos : {U, D}) {
            double tp = 0, fp = 0, fn = 0, correct = 0;
            for (std::size_t i = 0; i < n; ++i) {
                correct += p[i] == t[i];
                tp += p[i] == pos && t[i] == pos;
                fp += p[i] == pos && t[i] != pos;
                fn += p[i] != pos && t[i] == pos;
            }
            const double P = tp + fp > 0 ? tp / (tp + fp) : 0, R = tp + fn > 0 ? tp / (tp + fn) : 0;
            const double F = P + R > 0 ? 2 * P * R / (P + R) : 0;
            const auto m = metrics(confusion(p, t, pos));
            CHECK(std::abs(m.acc - correct / static_cast<double>(n)) <= 1e-12);
            CHECK(std::abs(m.precision - P) <= 1e-12);
            CHECK(std::abs(m.recall - R) <= 1e-12);
            CHECK(std::abs(m.f1 - F) <= 1e-12);
            if (P > 0 && R > 0) {
                CHECK(m.f1 >= std::min(P, R) - 1e-15);
                CHECK(m.f1 <= std::max(P, R) + 1e-15);
            }
        }
        CHECK(metrics(confusion(p, t, U)).acc == metrics(confusion(p, t, D)).acc);
    }
}

TEST_CASE("evaluate reports the fallback rate") {
    const std::vector<DayPrediction> days{day(0, U, U, true), day(1, D, U), day(2, D, D), day(3, U, D, true)};
    const auto m = evaluate(days, D);
    CHECK(m.fallback_rate == 0.5);
    CHECK(m.positive_class == D);
    CHECK(m.acc == 0.5);
}

TEST_CASE("incomplete beta and t distribution") {
    using namespace stats;
    CHECK(regularized_incomplete_beta(1, 1, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(regularized_incomplete_beta(2, 3, 0.4) == doctest::Approx(0.5248).epsilon(1e-10));
    CHECK(regularized_incomplete_beta(0.5, 0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(regularized_incomplete_beta(3, 2, 0) == 0.0);
    CHECK(regularized_incomplete_beta(3, 2, 1) == 1.0);
    // Cauchy: df = 1.
    for (double t : {-3.0, -0.5, 0.0, 0.7, 12.0}) {
        CHECK(std::abs(student_t_cdf(t, 1) - (0.5 + std::atan(t) / std::numbers::pi)) < 1e-9);
    }
    // df = 2 has a closed form.
    for (double t : {-4.0, 0.3, 2.5}) {
        CHECK(std::abs(student_t_cdf(t, 2) - (0.5 + t / (2 * std::sqrt(2 + t * t)))) < 1e-9);
    }
    CHECK(std::abs(student_t_two_sided_p(2.093024054, 19) - 0.05) < 1e-8);
    CHECK(student_t_two_sided_p(0, 7) == doctest::Approx(1.0));
    for (double t : {0.2, 1.1, 2.7, 5.0}) {
        for (double df : {3.0, 10.0, 99.0}) {
            CHECK(std::abs(student_t_two_sided_p(t, df) - simpson_two_sided_p(t, df)) < 1e-9);
        }
    }
}

TEST_CASE("paired t-test") {
    const std::vector<double> a{1, 1, 1, 1, 0, 1, 0, 1, 1, 0}, b{0, 0, 0, 0, 0, 1, 1, 1, 0, 0};
    const auto r = paired_ttest(a, b);
    // d = [1,1,1,1,0,0,-1,0,1,0]: mean 0.4, sd sqrt(0.4888...)
    double mean = 0.4, ss = 0;
    for (std::size_t i = 0; i < a.size(); ++i) ss += std::pow(a[i] - b[i] - mean, 2);
    const double t = mean / std::sqrt(ss / 9 / 10);
    CHECK(r.t_statistic == doctest::Approx(t).epsilon(1e-12));
    CHECK(std::abs(r.p_value - simpson_two_sided_p(t, 9)) < 1e-6);
    CHECK(r.n_pairs == 10);
    CHECK_FALSE(r.degenerate);

    const auto same = paired_ttest(a, a);
    CHECK(same.t_statistic == 0);
    CHECK(same.p_value == 1.0);
    CHECK(same.degenerate);

    const std::vector<double> shifted{2, 2, 2, 2, 1, 2, 1, 2, 2, 1};
    const auto constant = paired_ttest(shifted, a);
    CHECK(std::isinf(constant.t_statistic));
    CHECK(constant.p_value == 0.0);
    CHECK(constant.degenerate);

    CHECK_THROWS_AS(paired_ttest(std::vector{1.0}, std::vector{0.0}), ValidationError);
    CHECK_THROWS_AS(paired_ttest(std::vector{1.0, 0.0}, std::vector{0.0}), ValidationError);

    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 60;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<double>(rng() % 2);
            y[i] = static_cast<double>(rng() % 2);
        }
        const auto xy = paired_ttest(x, y), yx = paired_ttest(y, x);
        CHECK(xy.t_statistic == -yx.t_statistic);
        CHECK(xy.p_value == yx.p_value);
        CHECK(xy.p_value >= 0.0);
        CHECK(xy.p_value <= 1.0);
    }
}

TEST_CASE("compare_runs pairs days by date") {
    const std::vector<DayPrediction> a{day(0, U, U), day(1, D, U), day(2, D, D)};
    const std::vector<DayPrediction> b{day(0, D, U), day(1, D, U), day(2, D, D)};
    CHECK(correctness(a) == std::vector<double>{1, 0, 1});
    CHECK(compare_runs(a, b).n_pairs == 3);
    const std::vector<DayPrediction> c{day(0, U, U), day(1, D, U), day(5, D, D)};
    CHECK_THROWS_AS(compare_runs(a, c), ValidationError);
}

TEST_CASE("report files") {
    tvtest::TempDir dir("report");
    const std::vector<DayPrediction> a{day(0, U, U), day(1, D, U), day(2, D, D), day(3, U, D)};
    std::vector<RunSummary> runs;
    for (const char* name : {"standard", "voting", "dtv"}) {
        nlohmann::ordered_json cfg;
        cfg["method.kind"] = name;
        runs.push_back({name, cfg, evaluate(a), {}});
    }
    runs[2].significance.push_back({"standard", compare_runs(a, a)});
    std::vector<SeriesPoint> series;
    for (int n : {10, 20, 30, 40, 60, 80}) series.push_back({std::to_string(n), evaluate(a)});

    const auto files = report(runs, dir.path(), "news", series);
    const auto table = tvtest::slurp(files.table);
    CHECK(table.rfind("Positive class: Up", 0) == 0);
    for (const char* name : {"| standard", "| voting", "| dtv"}) CHECK(table.find(name) != std::string::npos);

    REQUIRE(files.series);
    std::istringstream csv(tvtest::slurp(*files.series));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "x,acc,p,r,f1");
    int rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 6);

    std::istringstream results(tvtest::slurp(files.results));
    int records = 0;
    while (std::getline(results, line)) {
        const auto j = nlohmann::ordered_json::parse(line);
        CHECK(j.contains("config"));
        CHECK(j["metrics"]["positive_class"] == "Up");
        ++records;
    }
    CHECK(records == 3);

    CHECK_THROWS_AS(report(std::vector<RunSummary>{}, dir.path()), ValidationError);
    CHECK_FALSE(report(runs, dir.path(), "plain").series);
}
