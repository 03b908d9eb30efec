#include "trendvote/report.hpp"

#include "trendvote/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace trendvote {

namespace {

std::string fixed(double v, int digits) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

}  // namespace

nlohmann::ordered_json to_json(const MetricsRow& row) {
    nlohmann::ordered_json j;
    j["acc"] = row.acc;
    j["precision"] = row.precision;
    j["recall"] = row.recall;
    j["f1"] = row.f1;
    j["n_days"] = row.n_days;
    j["fallback_rate"] = row.fallback_rate;
    j["positive_class"] = to_string(row.positive_class);
    j["precision_undefined"] = row.precision_undefined;
    j["recall_undefined"] = row.recall_undefined;
    return j;
}

nlohmann::ordered_json to_json(const SignificanceResult& sig) {
    nlohmann::ordered_json j;
    // JSON has no infinity; the degenerate flag explains a null t.
    if (std::isfinite(sig.t_statistic)) j["t_statistic"] = sig.t_statistic;
    else j["t_statistic"] = nullptr;
    j["p_value"] = sig.p_value;
    j["n_pairs"] = sig.n_pairs;
    j["degenerate"] = sig.degenerate;
    return j;
}

void write_results(std::ostream& out, std::span<const RunSummary> runs) {
    for (const auto& run : runs) {
        nlohmann::ordered_json j;
        j["run"] = run.name;
        j["config"] = run.config;
        j["metrics"] = to_json(run.metrics);
        auto sig = nlohmann::ordered_json::array();
        for (const auto& cmp : run.significance) {
            auto entry = to_json(cmp.result);
            entry["against"] = cmp.against;
            sig.push_back(std::move(entry));
        }
        j["significance"] = std::move(sig);
        out << j.dump() << '\n';
    }
}

void write_table(std::ostream& out, std::span<const RunSummary> runs) {
    std::size_t width = 3;
    for (const auto& run : runs) width = std::max(width, run.name.size());
    const auto pad = [width](const std::string& s) { return s + std::string(width - s.size(), ' '); };

    const TrendLabel positive = runs.empty() ? TrendLabel::Up : runs.front().metrics.positive_class;
    out << "Positive class: " << to_string(positive) << "\n\n";
    out << "| " << pad("Run") << " |    Acc |      P |      R |     F1 | Days | Fallback |\n";
    out << "|-" << std::string(width, '-') << "-|-------:|-------:|-------:|-------:|-----:|---------:|\n";
    for (const auto& run : runs) {
        const auto& m = run.metrics;
        out << "| " << pad(run.name) << " | " << std::setw(6) << fixed(100 * m.acc, 2) << " | " << std::setw(6)
            << fixed(100 * m.precision, 2) << " | " << std::setw(6) << fixed(100 * m.recall, 2) << " | "
            << std::setw(6) << fixed(100 * m.f1, 2) << " | " << std::setw(4) << m.n_days << " | " << std::setw(8)
            << fixed(100 * m.fallback_rate, 2) << " |\n";
    }

    bool any = false;
    for (const auto& run : runs) any = any || !run.significance.empty();
    if (!any) return;
    out << "\nPaired t-test on per-day correctness (two-sided):\n\n";
    out << "| Run | Against | t | p | Pairs |\n|---|---|---:|---:|---:|\n";
    for (const auto& run : runs) {
        for (const auto& cmp : run.significance) {
            out << "| " << run.name << " | " << cmp.against << " | " << fixed(cmp.result.t_statistic, 4) << " | "
                << fixed(cmp.result.p_value, 6) << (cmp.result.degenerate ? " (degenerate)" : "") << " | "
                << cmp.result.n_pairs << " |\n";
        }
    }
}

void write_series(std::ostream& out, std::span<const SeriesPoint> series) {
    out << "x,acc,p,r,f1\n";
    for (const auto& point : series) {
        out << point.x << ',' << fixed(point.metrics.acc, 6) << ',' << fixed(point.metrics.precision, 6) << ','
            << fixed(point.metrics.recall, 6) << ',' << fixed(point.metrics.f1, 6) << '\n';
    }
}

ReportFiles report(std::span<const RunSummary> runs, const std::filesystem::path& dir, const std::string& stem,
                   std::span<const SeriesPoint> series) {
    if (runs.empty()) throw ValidationError("report needs at least one run");
    std::filesystem::create_directories(dir);
    ReportFiles files{dir / (stem + "_results.jsonl"), dir / (stem + "_table.md"), std::nullopt};
    {
        auto out = open_output(files.results);
        write_results(out, runs);
    }
    {
        auto out = open_output(files.table);
        write_table(out, runs);
    }
    if (!series.empty()) {
        files.series = dir / (stem + "_series.csv");
        auto out = open_output(*files.series);
        write_series(out, series);
    }
    return files;
}

}  // namespace trendvote
