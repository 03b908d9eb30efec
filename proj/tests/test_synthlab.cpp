#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "trendvote/corpus.hpp"
#include "trendvote/error.hpp"
#include "trendvote/pipeline.hpp"
#include "trendvote/synthlab.hpp"

#include <cmath>
#include <sstream>

using namespace trendvote;
using namespace trendvote::synth;

namespace {

// Sums over all 2^m voter outcomes for one trend and applies the strict
// ratio rule directly.
double enumerate_accuracy(std::size_t m, double q, double lambda) {
    double total = 0;
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        std::size_t right = 0;
        double p = 1;
        for (std::size_t i = 0; i < m; ++i) {
            const bool ok = (mask >> i) & 1u;
            right += ok;
            p *= ok ? q : 1 - q;
        }
        const std::size_t wrong = m - right;
        // Truth Up: right voters say Up. Truth Down: right voters say Down.
        const bool up_correct = !(static_cast<double>(wrong) / static_cast<double>(m) > lambda);
        const bool down_correct = static_cast<double>(right) / static_cast<double>(m) > lambda;
        total += p * (0.5 * up_correct + 0.5 * down_correct);
    }
    return total;
}

}  // namespace

TEST_CASE("config validation") {
    SynthConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.n_days = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.relevance_rate = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.items_per_day = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("generation layout") {
    SynthConfig cfg;
    cfg.n_days = 40;
    cfg.items_per_day = 5;
    cfg.seed = 3;
    const auto c = generate(cfg);
    CHECK(c.days.size() == 40);
    CHECK(c.news.size() == 200);
    CHECK(c.truth.size() == 200);
    CHECK(c.prices.size() == 41);

    // Prices reproduce the planted trends through the corpus module.
    const auto built = build_instances(c.news, c.prices);
    REQUIRE(built.instances.size() == 40);
    CHECK(built.unused_news == 0);
    for (std::size_t k = 0; k < 40; ++k) {
        CHECK(built.instances[k].truth == c.days[k].true_trend);
        CHECK(built.instances[k].target_date == c.days[k].target_date);
        CHECK(built.instances[k].news.size() == 5);
    }
    const auto lex = synth_lexicon();
    for (const auto& day : c.days) {
        for (const auto& [item, truth] : day.items) {
            const double s = lex.score(item.title);
            CHECK(s != 0);
            CHECK((s > 0 ? ItemLabel::Up : ItemLabel::Down) == truth.surface_reading);
            if (truth.relevant) CHECK(truth.surface_reading == truth.planted_label);
            CHECK(item.article);
        }
    }
}

TEST_CASE("generation extremes") {
    SynthConfig cfg;
    cfg.n_days = 60;
    cfg.items_per_day = 4;
    cfg.relevance_rate = 1.0;
    cfg.direction_accuracy = 1.0;
    for (const auto& day : generate(cfg).days) {
        for (const auto& [item, truth] : day.items) CHECK(truth.planted_label == to_item_label(day.true_trend));
    }

    cfg.relevance_rate = 0.0;
    const auto noise = generate(cfg);
    OracleClassifier oracle(noise.truth, 0, 0, 0);
    std::vector<PredictionInstance> insts;
    for (const auto& day : noise.days) {
        CHECK(day.relevant_count() == 0);
        PredictionInstance inst{day.target_date, {}, day.true_trend};
        for (const auto& [n, t] : day.items) inst.news.push_back(n);
        insts.push_back(inst);
    }
    MethodConfig m;
    m.shots_per_class = 0;
    for (const auto& p : run_method(insts, m, {}, oracle)) CHECK(p.fallback_used);
}

TEST_CASE("generation is deterministic in the seed") {
    tvtest::TempDir dir("synth");
    SynthConfig cfg;
    cfg.n_days = 25;
    cfg.seed = 99;
    const auto a = write_corpus(generate(cfg), dir / "a");
    const auto b = write_corpus(generate(cfg), dir / "b");
    CHECK(tvtest::slurp(a.news) == tvtest::slurp(b.news));
    CHECK(tvtest::slurp(a.prices) == tvtest::slurp(b.prices));
    CHECK(tvtest::slurp(a.truth) == tvtest::slurp(b.truth));
    cfg.seed = 100;
    const auto c = write_corpus(generate(cfg), dir / "c");
    CHECK(tvtest::slurp(a.truth) != tvtest::slurp(c.truth));

    const auto back = load_truth(a.truth);
    const auto orig = generate(SynthConfig{25, 20, 0.5, 0.8, 0.5, 99});
    REQUIRE(back.size() == orig.truth.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].id == orig.truth[i].id);
        CHECK(back[i].truth.planted_label == orig.truth[i].truth.planted_label);
        CHECK(back[i].truth.surface_reading == orig.truth[i].truth.surface_reading);
        CHECK(back[i].truth.relevant == orig.truth[i].truth.relevant);
    }
}

TEST_CASE("generated rates match the configuration") {
    SynthConfig cfg;
    cfg.n_days = 400;
    cfg.items_per_day = 25;
    cfg.relevance_rate = 0.3;
    cfg.direction_accuracy = 0.7;
    cfg.noise_direction_bias = 0.8;
    cfg.seed = 5;
    const auto c = generate(cfg);
    double relevant = 0, agree = 0, noise = 0, noise_up = 0, up_days = 0;
    for (const auto& day : c.days) {
        up_days += day.true_trend == TrendLabel::Up;
        for (const auto& [item, t] : day.items) {
            if (t.relevant) {
                ++relevant;
                agree += t.planted_label == to_item_label(day.true_trend);
            } else {
                ++noise;
                noise_up += t.surface_reading == ItemLabel::Up;
            }
        }
    }
    const double n = 400.0 * 25;
    CHECK(std::abs(relevant / n - 0.3) < 4 * std::sqrt(0.21 / n));
    CHECK(std::abs(agree / relevant - 0.7) < 4 * std::sqrt(0.21 / relevant));
    CHECK(std::abs(noise_up / noise - 0.8) < 4 * std::sqrt(0.16 / noise));
    CHECK(std::abs(up_days / 400 - 0.5) < 4 * std::sqrt(0.25 / 400));
}

TEST_CASE("oracle error rates") {
    SynthConfig cfg;
    cfg.n_days = 300;
    cfg.items_per_day = 20;
    cfg.seed = 8;
    const auto c = generate(cfg);
    OracleClassifier noisy(c.truth, 0.1, 0.2, 77);
    double rel = 0, rel_flip = 0, dir = 0, dir_flip = 0;
    for (const auto& rec : c.truth) {
        const auto got = noisy.label_for(rec.id, LabelSet::Ternary);
        if (rec.truth.relevant) {
            ++rel;
            if (got == ItemLabel::Irrelevant) {
                ++rel_flip;
            } else {
                ++dir;
                dir_flip += got != rec.truth.planted_label;
            }
        }
    }
    CHECK(std::abs(rel_flip / rel - 0.1) < 4 * std::sqrt(0.09 / rel));
    CHECK(std::abs(dir_flip / dir - 0.2) < 4 * std::sqrt(0.16 / dir));
}

TEST_CASE("expected vote accuracy") {
    CHECK(expected_vote_accuracy(1, 0.8, 0.5).probability == doctest::Approx(0.8).epsilon(1e-15));
    for (double lambda : {0.05, 0.3, 0.5, 0.9}) {
        CHECK(expected_vote_accuracy(3, 1.0, lambda).probability == doctest::Approx(1.0));
    }
    const double jury = 0.8 * 0.8 * 0.8 + 3 * 0.8 * 0.8 * 0.2;
    CHECK(jury == doctest::Approx(0.896).epsilon(1e-15));
    CHECK(enumerate_accuracy(3, 0.8, 0.5) == doctest::Approx(jury).epsilon(1e-14));
    CHECK(expected_vote_accuracy(3, 0.8, 0.5).probability == doctest::Approx(jury).epsilon(1e-14));
    CHECK_FALSE(expected_vote_accuracy(3, 0.8, 0.5).approximate);

    for (std::size_t m = 1; m <= 12; ++m) {
        for (double q : {0.55, 0.7, 0.9}) {
            for (double lambda : {0.2, 0.5, 0.65}) {
                CHECK(std::abs(expected_vote_accuracy(m, q, lambda).probability - enumerate_accuracy(m, q, lambda)) <
                      1e-12);
            }
        }
    }

    // Jury-theorem direction for odd m.
    for (std::size_t m = 1; m <= 15; m += 2) {
        double prev = 0.5;
        for (double q = 0.51; q <= 1.0001; q += 0.01) {
            const double p = expected_vote_accuracy(m, std::min(q, 1.0), 0.5).probability;
            CHECK(p > prev);
            CHECK(p >= std::min(q, 1.0) - 1e-12);
            prev = p;
        }
    }

    const auto big = expected_vote_accuracy(60, 0.6, 0.5);
    CHECK(big.approximate);
    CHECK(big.probability > 0.9);
    CHECK(big.probability < 1.0);
}

TEST_CASE("predicted DTV accuracy scores fallback days") {
    SynthConfig cfg;
    cfg.n_days = 100;
    cfg.items_per_day = 2;
    cfg.relevance_rate = 0.0;
    cfg.seed = 1;
    const auto c = generate(cfg);
    double up = 0;
    for (const auto& d : c.days) up += d.true_trend == TrendLabel::Up;
    CHECK(predicted_dtv_accuracy(c.days, 0.8, 0.5, TrendLabel::Up) == doctest::Approx(up / 100));
    CHECK(predicted_dtv_accuracy(c.days, 0.8, 0.5, TrendLabel::Down) == doctest::Approx(1 - up / 100));
}
