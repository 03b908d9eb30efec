#pragma once

#include "trendvote/evaluation.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trendvote {

struct PairedComparison {
    std::string against;  // name of the other run
    SignificanceResult result;
};

struct RunSummary {
    std::string name;
    nlohmann::ordered_json config;  // echoed verbatim into the results file
    MetricsRow metrics;
    std::vector<PairedComparison> significance;
};

// One point of an accuracy-vs-x series (news count, shots, lambda, variant).
struct SeriesPoint {
    std::string x;
    MetricsRow metrics;
};

// Results file: one JSON record per run.
void write_results(std::ostream& out, std::span<const RunSummary> runs);

// Markdown table; always names the positive class.
void write_table(std::ostream& out, std::span<const RunSummary> runs);

// Header `x,acc,p,r,f1`.
void write_series(std::ostream& out, std::span<const SeriesPoint> series);

struct ReportFiles {
    std::filesystem::path results;
    std::filesystem::path table;
    std::optional<std::filesystem::path> series;
};

// Writes <stem>_results.jsonl and <stem>_table.md into dir, plus
// <stem>_series.csv when series is non-empty. Throws ValidationError if runs is empty.
ReportFiles report(std::span<const RunSummary> runs, const std::filesystem::path& dir,
                   const std::string& stem = "report", std::span<const SeriesPoint> series = {});

nlohmann::ordered_json to_json(const MetricsRow& row);
nlohmann::ordered_json to_json(const SignificanceResult& sig);

}  // namespace trendvote
