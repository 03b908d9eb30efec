#include "trendvote/corpus.hpp"

#include "trendvote/error.hpp"
#include "trendvote/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <unordered_set>

namespace trendvote {

using json = nlohmann::json;

namespace {

std::string strip(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    return in;
}

NewsItem parse_news_record(const std::string& line, std::size_t line_no) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed news record: ") + e.what(), line_no);
    }
    if (!j.is_object()) throw ParseError("news record must be a JSON object", line_no);

    NewsItem item;
    auto date = j.find("date");
    if (date == j.end() || !date->is_string()) throw ParseError("missing string field 'date'", line_no);
    try {
        item.date = parse_date(date->get<std::string>());
    } catch (const ParseError& e) {
        throw ParseError(e.what(), line_no);
    }

    auto title = j.find("title");
    if (title == j.end() || !title->is_string()) throw ParseError("missing string field 'title'", line_no);
    item.title = title->get<std::string>();
    if (strip(item.title).empty()) throw ParseError("empty title", line_no);

    if (auto it = j.find("article"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) throw ParseError("'article' must be a string", line_no);
        item.article = it->get<std::string>();
    }
    if (auto it = j.find("tickers"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) throw ParseError("'tickers' must be an array of strings", line_no);
        for (const auto& t : *it) {
            if (!t.is_string()) throw ParseError("'tickers' must be an array of strings", line_no);
            item.tickers.push_back(t.get<std::string>());
        }
    }
    if (auto it = j.find("id"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) throw ParseError("'id' must be a string", line_no);
        item.id = it->get<std::string>();
    } else {
        item.id = std::to_string(line_no);
    }
    return item;
}

}  // namespace

std::string_view to_string(SplitName name) {
    switch (name) {
        case SplitName::Train: return "train";
        case SplitName::Valid: return "valid";
        case SplitName::Test: return "test";
    }
    return "?";
}

SplitName parse_split_name(std::string_view text) {
    if (text == "train") return SplitName::Train;
    if (text == "valid" || text == "validation") return SplitName::Valid;
    if (text == "test") return SplitName::Test;
    throw ParseError("unknown split '" + std::string(text) + "'");
}

std::vector<NewsItem> read_news(std::istream& in) {
    std::vector<NewsItem> out;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        auto item = parse_news_record(line, line_no);
        if (!seen.insert(item.id).second) {
            throw ValidationError("line " + std::to_string(line_no) + ": duplicate news id '" + item.id + "'");
        }
        out.push_back(std::move(item));
    }
    return out;
}

std::vector<NewsItem> ingest_news(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_news(in);
}

void write_news(std::ostream& out, const std::vector<NewsItem>& news) {
    for (const auto& item : news) {
        nlohmann::ordered_json j;
        j["id"] = item.id;
        j["date"] = format_date(item.date);
        j["title"] = item.title;
        if (item.article) j["article"] = *item.article;
        if (!item.tickers.empty()) j["tickers"] = item.tickers;
        out << j.dump() << '\n';
    }
}

std::vector<PriceBar> read_prices(std::istream& in) {
    std::vector<PriceBar> bars;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto row = strip(line);
        if (row.empty()) continue;
        if (!header_seen) {
            if (row != "date,adj_close") {
                throw ParseError("expected header 'date,adj_close'", line_no);
            }
            header_seen = true;
            continue;
        }
        const auto comma = row.find(',');
        if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos) {
            throw ParseError("expected two comma-separated columns", line_no);
        }
        PriceBar bar;
        try {
            bar.date = parse_date(strip(row.substr(0, comma)));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line_no);
        }
        const auto value = strip(row.substr(comma + 1));
        const char* begin = value.data();
        const char* end = begin + value.size();
        auto [ptr, ec] = std::from_chars(begin, end, bar.adj_close);
        if (ec != std::errc{} || ptr != end) throw ParseError("bad price '" + value + "'", line_no);
        if (!(bar.adj_close > 0.0)) {
            throw ValidationError("line " + std::to_string(line_no) + ": adj_close must be positive");
        }
        if (!bars.empty() && !(bars.back().date < bar.date)) {
            throw ValidationError("line " + std::to_string(line_no) + ": dates must be strictly increasing");
        }
        bars.push_back(bar);
    }
    return bars;
}

std::vector<PriceBar> ingest_prices(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_prices(in);
}

void write_prices(std::ostream& out, const std::vector<PriceBar>& bars) {
    out << "date,adj_close\n";
    for (const auto& bar : bars) {
        std::ostringstream value;
        value.precision(10);
        value << bar.adj_close;
        out << format_date(bar.date) << ',' << value.str() << '\n';
    }
}

std::map<Date, TrendLabel> derive_labels(const std::vector<PriceBar>& prices) {
    if (prices.size() < 2) throw ValidationError("need at least two price bars to derive labels");
    std::map<Date, TrendLabel> labels;
    for (std::size_t k = 1; k < prices.size(); ++k) {
        labels.emplace(prices[k].date,
                       prices[k].adj_close > prices[k - 1].adj_close ? TrendLabel::Up : TrendLabel::Down);
    }
    return labels;
}

InstanceBuild build_instances(const std::vector<NewsItem>& news, const std::vector<PriceBar>& prices) {
    const auto labels = derive_labels(prices);

    std::vector<const NewsItem*> ordered;
    ordered.reserve(news.size());
    for (const auto& item : news) ordered.push_back(&item);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const NewsItem* a, const NewsItem* b) { return a->date < b->date; });

    InstanceBuild out;
    std::size_t used = 0;
    auto cursor = ordered.begin();
    for (std::size_t k = 1; k < prices.size(); ++k) {
        const Date open = prices[k - 1].date;
        const Date target = prices[k].date;
        cursor = std::lower_bound(cursor, ordered.end(), open,
                                  [](const NewsItem* n, Date d) { return n->date < d; });
        PredictionInstance instance{target, {}, labels.at(target)};
        for (auto it = cursor; it != ordered.end() && (*it)->date < target; ++it) {
            instance.news.push_back(**it);
        }
        if (instance.news.empty()) {
            ++out.dropped_empty;
            continue;
        }
        used += instance.news.size();
        out.instances.push_back(std::move(instance));
    }
    out.unused_news = news.size() - used;
    return out;
}

std::vector<NewsItem> filter_by_ticker(const std::vector<NewsItem>& news, const std::string& ticker) {
    std::vector<NewsItem> out;
    for (const auto& item : news) {
        if (std::find(item.tickers.begin(), item.tickers.end(), ticker) != item.tickers.end()) {
            out.push_back(item);
        }
    }
    return out;
}

const DatasetSplit& SplitResult::get(SplitName name) const {
    switch (name) {
        case SplitName::Train: return train;
        case SplitName::Valid: return valid;
        case SplitName::Test: return test;
    }
    return test;
}

SplitResult split_dataset(const std::vector<PredictionInstance>& instances, const SplitSpans& spans) {
    const DateSpan* ordered[] = {&spans.train, &spans.valid, &spans.test};
    const DateSpan* prev = nullptr;
    for (const DateSpan* span : ordered) {
        if (span->empty()) continue;
        if (prev && !(prev->last < span->first)) {
            throw ValidationError("split spans must be disjoint and ordered train < valid < test: " +
                                  format_span(*prev) + " vs " + format_span(*span));
        }
        prev = span;
    }

    SplitResult out;
    out.train = {SplitName::Train, spans.train, {}};
    out.valid = {SplitName::Valid, spans.valid, {}};
    out.test = {SplitName::Test, spans.test, {}};
    for (const auto& inst : instances) {
        if (spans.train.contains(inst.target_date)) {
            out.train.instances.push_back(inst);
        } else if (spans.valid.contains(inst.target_date)) {
            out.valid.instances.push_back(inst);
        } else if (spans.test.contains(inst.target_date)) {
            out.test.instances.push_back(inst);
        } else {
            ++out.excluded;
        }
    }
    return out;
}

PredictionInstance sample_news(const PredictionInstance& instance, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ConfigError("news sample size must be at least 1");
    if (instance.news.size() <= n) return instance;

    // Selection sampling keeps the original order.
    std::mt19937_64 rng(derive_seed(seed, instance.id()));
    PredictionInstance out{instance.target_date, {}, instance.truth};
    out.news.reserve(n);
    std::size_t needed = n;
    std::size_t remaining = instance.news.size();
    for (const auto& item : instance.news) {
        if (uniform_below(rng, remaining) < needed) {
            out.news.push_back(item);
            if (--needed == 0) break;
        }
        --remaining;
    }
    return out;
}

}  // namespace trendvote
