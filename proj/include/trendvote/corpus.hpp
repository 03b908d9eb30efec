#pragma once

#include "trendvote/date.hpp"
#include "trendvote/labels.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace trendvote {

struct NewsItem {
    std::string id;
    Date date;
    std::string title;
    std::optional<std::string> article;
    std::vector<std::string> tickers;
};

struct PriceBar {
    Date date;
    double adj_close = 0.0;
};

// Day k with its news window and the realized movement y_k.
struct PredictionInstance {
    Date target_date;
    std::vector<NewsItem> news;
    TrendLabel truth = TrendLabel::Up;

    std::string id() const { return format_date(target_date); }
};

enum class SplitName { Train, Valid, Test };

std::string_view to_string(SplitName name);
SplitName parse_split_name(std::string_view text);

struct DatasetSplit {
    SplitName name = SplitName::Train;
    DateSpan span;
    std::vector<PredictionInstance> instances;
};

// News file: JSON Lines with `date`, `title`, optional `article`, `tickers`, `id`.
// The default id is the 1-based line number. Blank lines are skipped.
std::vector<NewsItem> read_news(std::istream& in);
std::vector<NewsItem> ingest_news(const std::filesystem::path& path);
void write_news(std::ostream& out, const std::vector<NewsItem>& news);

// Price file: header `date,adj_close`, then one row per trading day.
std::vector<PriceBar> read_prices(std::istream& in);
std::vector<PriceBar> ingest_prices(const std::filesystem::path& path);
void write_prices(std::ostream& out, const std::vector<PriceBar>& bars);

// Label for every bar after the first: Up iff the close strictly rose.
std::map<Date, TrendLabel> derive_labels(const std::vector<PriceBar>& prices);

struct InstanceBuild {
    std::vector<PredictionInstance> instances;
    std::size_t dropped_empty = 0;   // labeled days whose window had no news
    std::size_t unused_news = 0;     // news outside every window
};

// Window for day k is [previous trading day, day k): news from the previous
// session plus anything dated on the non-trading days in between.
InstanceBuild build_instances(const std::vector<NewsItem>& news, const std::vector<PriceBar>& prices);

std::vector<NewsItem> filter_by_ticker(const std::vector<NewsItem>& news, const std::string& ticker);

struct SplitSpans {
    DateSpan train;
    DateSpan valid;
    DateSpan test;
};

struct SplitResult {
    DatasetSplit train;
    DatasetSplit valid;
    DatasetSplit test;
    std::size_t excluded = 0;  // instances outside every span

    const DatasetSplit& get(SplitName name) const;
};

// Throws ValidationError when non-empty spans overlap or are out of order.
SplitResult split_dataset(const std::vector<PredictionInstance>& instances, const SplitSpans& spans);

// At most n items of the window, chosen uniformly without replacement and
// kept in original order. Deterministic in (seed, instance id).
PredictionInstance sample_news(const PredictionInstance& instance, std::size_t n, std::uint64_t seed);

}  // namespace trendvote
