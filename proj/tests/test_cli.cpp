#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mock_server.hpp"
#include "support.hpp"
#include "trendvote/cli.hpp"
#include "trendvote/error.hpp"
#include "trendvote/evaluation.hpp"
#include "trendvote/log.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

using namespace trendvote;

namespace {

const std::string kDemo = (tvtest::fixtures() / "demo/demo.ini").string();

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err, logs;
    log::set_sink(&logs);
    const int code = cli::run(args, out, err);
    log::set_sink(nullptr);
    return {code, out.str(), err.str() + logs.str()};
}

std::vector<DayPrediction> load(const std::filesystem::path& p) {
    std::ifstream in(p);
    return read_predictions(in);
}

std::size_t lines(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

}  // namespace

TEST_CASE("config file and overrides") {
    const auto cfg = load_run_config(kDemo, {{"method.lambda", "0.3"}, {"output.dir", "rel/out"}});
    CHECK(cfg.method.kind == MethodKind::DTV);
    CHECK(cfg.method.lambda == 0.3);
    CHECK(cfg.method.shots_per_class == 2);
    CHECK(cfg.news_path == tvtest::fixtures() / "demo/news.jsonl");
    CHECK(cfg.lexicon_path == tvtest::fixtures() / "demo/../lexicon.txt");
    CHECK(cfg.out_dir == std::filesystem::current_path() / "rel/out");
    CHECK(cfg.backend == BackendKind::Lexicon);
    CHECK(cfg.split == SplitName::Test);
    CHECK(cfg.echo()["method.lambda"] == "0.3");

    CHECK_THROWS_AS(load_run_config(std::filesystem::path("/nonexistent.ini")), ValidationError);
    CHECK_THROWS_AS(load_run_config(kDemo, {{"method.lambda", "high"}}), ConfigError);
    CHECK_THROWS_AS(load_run_config(kDemo, {{"method.kind", "oracle"}}), ConfigError);
    CHECK_THROWS_AS(load_run_config(kDemo, {{"backend.kind", "psychic"}}), ConfigError);

    const auto defaults = load_run_config(std::nullopt);
    CHECK(defaults.method.lambda == 0.5);
    CHECK(defaults.method.temperature == 0.0);
    CHECK(defaults.method.shots_per_class == 3);
    CHECK(defaults.remote.api_key_env == "TRENDVOTE_API_KEY");
}

TEST_CASE("ingest") {
    const auto r = run({"ingest", "--config", kDemo});
    REQUIRE(r.code == 0);
    // Day counts from the truth file: one target day per distinct news date.
    const auto truth = synth::load_truth(tvtest::fixtures() / "demo/truth.jsonl");
    std::set<Date> news_dates;
    for (const auto& rec : truth) news_dates.insert(rec.date);
    const auto cfg = load_run_config(kDemo);
    std::map<std::string, std::size_t> expected;
    for (const auto d : news_dates) {
        const Date target = d + std::chrono::days(1);
        if (cfg.spans->train.contains(target)) ++expected["train"];
        if (cfg.spans->valid.contains(target)) ++expected["valid"];
        if (cfg.spans->test.contains(target)) ++expected["test"];
    }
    for (const auto& [name, n] : expected) {
        const auto pos = r.out.find("\n" + name + " ");
        REQUIRE(pos != std::string::npos);
        std::istringstream row(r.out.substr(pos + 1));
        std::string split, span;
        std::size_t days = 0;
        row >> split >> span >> days;
        CHECK(days == n);
    }

    const auto missing = run({"ingest", "--config", kDemo, "--data.prices", "/nonexistent/p.csv"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("/nonexistent/p.csv") != std::string::npos);
}

TEST_CASE("predict writes the prediction file") {
    tvtest::TempDir dir("predict");
    const auto r = run({"predict", "--config", kDemo, "--method", "voting", "--out", dir.path().string()});
    REQUIRE(r.code == 0);
    const auto file = dir / "predictions_voting_test.jsonl";
    REQUIRE(std::filesystem::exists(file));
    const auto preds = load(file);
    CHECK(preds.size() == 34);
    for (const auto& p : preds) CHECK(p.method == MethodKind::Voting);

    // Standard via a dotted override.
    CHECK(run({"predict", "--config", kDemo, "--method.kind=standard", "--out", dir.path().string()}).code == 0);
    CHECK(std::filesystem::exists(dir / "predictions_standard_test.jsonl"));
}

TEST_CASE("predict with an exact oracle stays within the sampling band") {
    tvtest::TempDir dir("oracle");
    const auto r = run({"predict", "--config", kDemo, "--backend", "oracle", "--backend.relevance_error", "0",
                        "--backend.direction_error", "0", "--split", "train", "--out", dir.path().string()});
    REQUIRE(r.code == 0);
    const auto preds = load(dir / "predictions_dtv_train.jsonl");
    const auto cfg = load_run_config(kDemo);
    synth::SynthConfig sc;
    sc.n_days = 120;
    sc.items_per_day = 8;
    sc.seed = 7;
    sc.start = parse_date("2021-01-04");
    std::vector<synth::PlantedDay> days;
    for (const auto& d : synth::generate(sc).days) {
        if (cfg.spans->train.contains(d.target_date)) days.push_back(d);
    }
    REQUIRE(days.size() == preds.size());
    const double expected = synth::predicted_dtv_accuracy(days, 0.8, 0.5, TrendLabel::Up);
    const double band = 3 * std::sqrt(expected * (1 - expected) / static_cast<double>(preds.size()));
    CHECK(std::abs(accuracy(preds) - expected) <= band);
}

TEST_CASE("predict failures map to exit codes") {
    tvtest::TempDir dir("fail");
    // The oracle answers per item only.
    CHECK(run({"predict", "--config", kDemo, "--method", "standard", "--backend", "oracle", "--out",
               dir.path().string()})
              .code == 3);
    const auto cold = run({"predict", "--config", kDemo, "--backend", "replay", "--cache",
                           (dir / "empty.jsonl").string(), "--out", dir.path().string()});
    CHECK(cold.code == 3);
    CHECK(cold.err.find("cache miss") != std::string::npos);

    const auto mismatch = run({"predict", "--config", kDemo, "--method", "voting", "--prompts.pool_binary",
                               (tvtest::fixtures() / "pools/ternary.jsonl").string(), "--out",
                               dir.path().string()});
    CHECK(mismatch.code == 2);
    CHECK(mismatch.err.find("Irrelevant") != std::string::npos);

    CHECK(run({"predict", "--config", kDemo, "--bogus"}).code == 1);
    CHECK(run({"predict", "--config", kDemo, "--method", "psychic"}).code == 2);
    CHECK(run({}).code == 1);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("lambda sweep") {
    tvtest::TempDir dir("sweep");
    const auto r = run({"sweep", "--config", kDemo, "--axis", "lambda", "--backend", "oracle", "--out",
                        dir.path().string()});
    REQUIRE(r.code == 0);
    const auto series = dir / "sweep_lambda_dtv_series.csv";
    CHECK(lines(series) == 20);

    // Exhaustive re-vote on the validation split.
    CHECK(run({"predict", "--config", kDemo, "--backend", "oracle", "--split", "valid", "--out",
               dir.path().string()})
              .code == 0);
    const auto preds = load(dir / "predictions_dtv_valid.jsonl");
    double best_acc = -1, best_lambda = 0;
    std::ifstream csv(series);
    std::string line;
    std::getline(csv, line);
    for (const double lambda : default_lambda_grid()) {
        std::size_t hits = 0;
        for (const auto& p : preds) {
            const auto label = p.fallback_used ? p.final : vote(p.tally, lambda, TrendLabel::Up).label;
            hits += label == p.truth;
        }
        const double acc = static_cast<double>(hits) / static_cast<double>(preds.size());
        std::getline(csv, line);
        CHECK(std::stod(line.substr(line.find(',') + 1)) == doctest::Approx(acc).epsilon(1e-6));
        if (acc > best_acc + 1e-12 ||
            (std::abs(acc - best_acc) <= 1e-12 && std::abs(lambda - 0.5) < std::abs(best_lambda - 0.5) - 1e-12)) {
            best_acc = acc;
            best_lambda = lambda;
        }
    }
    char expect[64];
    std::snprintf(expect, sizeof expect, "best lambda %.2f", best_lambda);
    CHECK(r.out.find(expect) != std::string::npos);
}

TEST_CASE("shots and news-count sweeps") {
    tvtest::TempDir dir("shots");
    const auto shots = run({"sweep", "--config", kDemo, "--axis", "shots", "--sweep.shots", "0,3,6,9,12", "--out",
                            dir.path().string()});
    REQUIRE(shots.code == 0);
    CHECK(lines(dir / "sweep_shots_dtv_series.csv") == 6);

    const auto news = run({"sweep", "--config", kDemo, "--axis", "news_count", "--method", "voting", "--out",
                           dir.path().string()});
    REQUIRE(news.code == 0);
    CHECK(lines(dir / "sweep_news_count_voting_series.csv") == 7);

    const auto variant = run({"sweep", "--config", kDemo, "--axis", "variant", "--backend", "oracle", "--out",
                              dir.path().string()});
    REQUIRE(variant.code == 0);
    CHECK(lines(dir / "sweep_variant_dtv_series.csv") == 6);

    CHECK(run({"sweep", "--config", kDemo, "--axis", "colour"}).code == 1);
    CHECK(run({"sweep", "--config", kDemo, "--axis", "shots", "--sweep.shots", "4"}).code == 2);
}

TEST_CASE("eval") {
    tvtest::TempDir dir("eval");
    for (const char* m : {"dtv", "standard"}) {
        REQUIRE(run({"predict", "--config", kDemo, "--method", m, "--out", dir.path().string()}).code == 0);
    }
    const auto a = (dir / "predictions_dtv_test.jsonl").string();
    const auto b = (dir / "predictions_standard_test.jsonl").string();
    const auto both = run({"eval", a, b, "--out", (dir / "both").string()});
    REQUIRE(both.code == 0);
    CHECK(both.out.find("Positive class: Up") != std::string::npos);
    CHECK(both.out.find("| predictions_dtv_test | predictions_standard_test |") != std::string::npos);

    const auto single = run({"eval", a, "--out", (dir / "single").string()});
    REQUIRE(single.code == 0);
    CHECK(single.out.find("t-test") == std::string::npos);

    REQUIRE(run({"predict", "--config", kDemo, "--split", "valid", "--out", dir.path().string()}).code == 0);
    const auto skewed = run({"eval", a, (dir / "predictions_dtv_valid.jsonl").string(), "--out",
                             (dir / "skew").string()});
    CHECK(skewed.code == 0);
    CHECK(skewed.err.find("skipping t-test") != std::string::npos);

    CHECK(run({"eval"}).code == 1);
    const auto down = run({"eval", a, "--positive", "down", "--out", (dir / "down").string()});
    CHECK(down.out.find("Positive class: Down") != std::string::npos);
}

TEST_CASE("synth") {
    tvtest::TempDir dir("synthcli");
    const auto ini = dir / "s.ini";
    tvtest::spit(ini, "[synth]\nn_days = 30\nseed = 4\nout = gen\n");
    REQUIRE(run({"synth", "--config", ini.string()}).code == 0);
    const auto first = tvtest::slurp(dir / "gen/news.jsonl");
    CHECK(std::filesystem::exists(dir / "gen/prices.csv"));
    CHECK(std::filesystem::exists(dir / "gen/truth.jsonl"));
    REQUIRE(run({"synth", "--config", ini.string()}).code == 0);
    CHECK(tvtest::slurp(dir / "gen/news.jsonl") == first);
    CHECK(run({"synth", "--config", ini.string(), "--synth.n_days", "0"}).code == 2);

    tvtest::TempDir plain("synthdefault");
    CHECK(run({"synth", "--out", plain.path().string()}).code == 0);
    CHECK(lines(plain / "prices.csv") == 252);
}

TEST_CASE("the credential never reaches output files") {
    tvtest::TempDir dir("secret");
    ::setenv("TRENDVOTE_CLI_KEY", "sk-do-not-leak", 1);
    tvtest::MockChatServer server([](const std::string&, const std::string&) { return "Irrelevant"; });
    const auto r = run({"predict", "--config", kDemo, "--backend", "remote", "--backend.endpoint", server.endpoint(),
                        "--backend.api_key_env", "TRENDVOTE_CLI_KEY", "--cache", (dir / "cache.jsonl").string(),
                        "--out", dir.path().string()});
    REQUIRE(r.code == 0);
    CHECK(server.hits() > 0);
    CHECK(r.out.find("sk-do-not-leak") == std::string::npos);
    CHECK(r.err.find("sk-do-not-leak") == std::string::npos);
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir.path())) {
        if (entry.is_regular_file()) CHECK(tvtest::slurp(entry.path()).find("sk-do-not-leak") == std::string::npos);
    }
    ::unsetenv("TRENDVOTE_CLI_KEY");
    CHECK(run({"predict", "--config", kDemo, "--backend", "remote", "--backend.api_key_env", "TRENDVOTE_CLI_KEY",
               "--out", dir.path().string()})
              .code == 2);
}
