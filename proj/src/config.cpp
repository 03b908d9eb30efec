#include "trendvote/config.hpp"

#include "trendvote/error.hpp"

#include <boost/property_tree/ini_parser.hpp>

#include <charconv>
#include <set>
#include <sstream>

namespace trendvote {

namespace pt = boost::property_tree;

std::string_view to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::Remote: return "remote";
        case BackendKind::Lexicon: return "lexicon";
        case BackendKind::Oracle: return "oracle";
        case BackendKind::Replay: return "replay";
    }
    return "?";
}

BackendKind parse_backend_kind(std::string_view text) {
    const auto lower = to_lower(text);
    if (lower == "remote") return BackendKind::Remote;
    if (lower == "lexicon") return BackendKind::Lexicon;
    if (lower == "oracle") return BackendKind::Oracle;
    if (lower == "replay") return BackendKind::Replay;
    throw ConfigError("unknown backend '" + std::string(text) + "'");
}

namespace {

class Reader {
public:
    Reader(const pt::ptree& tree, const std::filesystem::path& base) : tree_(tree), base_(base) {}

    std::optional<std::string> str(const std::string& key) const {
        auto v = tree_.get_optional<std::string>(key);
        if (!v || v->empty()) return std::nullopt;
        return *v;
    }

    template <typename T>
    T number(const std::string& key, T fallback) const {
        const auto v = str(key);
        if (!v) return fallback;
        return parse_number<T>(key, *v);
    }

    std::optional<std::filesystem::path> path(const std::string& key) const {
        const auto v = str(key);
        if (!v) return std::nullopt;
        std::filesystem::path p(*v);
        return p.is_absolute() ? p : base_ / p;
    }

    template <typename T>
    std::optional<std::vector<T>> list(const std::string& key) const {
        const auto v = str(key);
        if (!v) return std::nullopt;
        std::vector<T> out;
        std::stringstream ss(*v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto b = item.find_first_not_of(" \t");
            const auto e = item.find_last_not_of(" \t");
            if (b == std::string::npos) continue;
            out.push_back(parse_number<T>(key, item.substr(b, e - b + 1)));
        }
        return out;
    }

    template <typename Fn>
    auto parsed(const std::string& key, Fn&& fn) const -> std::optional<decltype(fn(std::string{}))> {
        const auto v = str(key);
        if (!v) return std::nullopt;
        try {
            return fn(*v);
        } catch (const ParseError& e) {
            throw ConfigError(key + ": " + e.what());
        }
    }

    template <typename T>
    static T parse_number(const std::string& key, const std::string& text) {
        T value{};
        const char* b = text.data();
        const char* e = b + text.size();
        auto [ptr, ec] = std::from_chars(b, e, value);
        if (ec != std::errc{} || ptr != e) throw ConfigError(key + ": cannot parse '" + text + "'");
        return value;
    }

private:
    const pt::ptree& tree_;
    std::filesystem::path base_;
};

void flatten(const pt::ptree& tree, const std::string& prefix, nlohmann::ordered_json& out) {
    for (const auto& [key, child] : tree) {
        const auto name = prefix.empty() ? key : prefix + "." + key;
        if (child.empty()) {
            out[name] = child.data();
        } else {
            flatten(child, name, out);
        }
    }
}

}  // namespace

nlohmann::ordered_json RunConfig::echo() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    flatten(tree, "", j);
    return j;
}

RunConfig make_run_config(pt::ptree tree, std::filesystem::path base_dir) {
    RunConfig cfg;
    cfg.tree = std::move(tree);
    cfg.base_dir = std::move(base_dir);
    const Reader r(cfg.tree, cfg.base_dir);

    cfg.news_path = r.path("data.news");
    cfg.prices_path = r.path("data.prices");
    cfg.ticker = r.str("data.ticker");

    const auto train = r.parsed("splits.train", parse_span);
    const auto valid = r.parsed("splits.valid", parse_span);
    const auto test = r.parsed("splits.test", parse_span);
    if (train || valid || test) {
        if (!train || !valid || !test) throw ConfigError("splits.train, splits.valid and splits.test go together");
        cfg.spans = SplitSpans{*train, *valid, *test};
    }
    if (auto s = r.parsed("run.split", parse_split_name)) {
        cfg.split = *s;
        cfg.split_set = true;
    }

    auto& m = cfg.method;
    if (auto k = r.parsed("method.kind", parse_method_kind)) m.kind = *k;
    m.shots_per_class = r.number<std::size_t>("method.shots_per_class", m.shots_per_class);
    m.lambda = r.number<double>("method.lambda", m.lambda);
    m.max_news = r.number<std::size_t>("method.max_news", m.max_news);
    if (auto v = r.parsed("method.variant", parse_input_variant)) m.input_variant = *v;
    if (auto f = r.parsed("method.fallback", parse_trend_label)) m.fallback = *f;
    m.token_budget = r.number<std::size_t>("method.token_budget", kDefaultTokenBudget);
    m.seed = r.number<std::uint64_t>("method.seed", m.seed);
    if (auto p = r.parsed("method.error_policy", parse_error_policy)) m.error_policy = *p;
    if (auto model = r.str("method.model")) m.model_id = *model;
    m.temperature = r.number<double>("method.temperature", m.temperature);
    m.workers = r.number<std::size_t>("method.workers", m.workers);
    m.validate();

    cfg.item_template = r.path("prompts.template");
    cfg.standard_template = r.path("prompts.standard_template");
    cfg.pool_standard = r.path("prompts.pool_standard");
    cfg.pool_binary = r.path("prompts.pool_binary");
    cfg.pool_ternary = r.path("prompts.pool_ternary");

    if (auto b = r.str("backend.kind")) cfg.backend = parse_backend_kind(*b);
    cfg.cache_path = r.path("backend.cache");
    cfg.lexicon_path = r.path("backend.lexicon");
    cfg.truth_path = r.path("backend.truth");
    cfg.relevance_error = r.number<double>("backend.relevance_error", 0.0);
    cfg.direction_error = r.number<double>("backend.direction_error", 0.0);
    cfg.oracle_seed = r.number<std::uint64_t>("backend.seed", 0);
    if (auto e = r.str("backend.endpoint")) cfg.remote.endpoint = *e;
    if (auto e = r.str("backend.api_key_env")) cfg.remote.api_key_env = *e;
    if (auto e = r.str("backend.summary_model")) cfg.remote.summary_model_id = *e;
    cfg.remote.max_attempts = r.number<int>("backend.max_attempts", cfg.remote.max_attempts);
    cfg.remote.max_in_flight = r.number<std::size_t>("backend.max_in_flight", cfg.remote.max_in_flight);
    cfg.remote.requests_per_minute = r.number<double>("backend.requests_per_minute", cfg.remote.requests_per_minute);
    cfg.remote.base_backoff = std::chrono::milliseconds(
        r.number<long long>("backend.base_backoff_ms", cfg.remote.base_backoff.count()));
    cfg.remote.max_backoff =
        std::chrono::milliseconds(r.number<long long>("backend.max_backoff_ms", cfg.remote.max_backoff.count()));
    cfg.remote.timeout = std::chrono::seconds(r.number<long long>("backend.timeout_s", cfg.remote.timeout.count()));

    if (auto out = r.path("output.dir")) cfg.out_dir = *out;
    if (auto p = r.parsed("output.positive_class", parse_trend_label)) cfg.positive_class = *p;

    if (auto grid = r.list<double>("sweep.lambda_grid")) cfg.lambda_grid = *grid;
    if (auto shots = r.list<std::size_t>("sweep.shots")) cfg.shots_grid = *shots;
    if (auto counts = r.list<std::size_t>("sweep.news_counts")) cfg.news_counts = *counts;
    if (auto v = r.str("sweep.variants")) {
        std::stringstream ss(*v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto b = item.find_first_not_of(" \t");
            const auto e = item.find_last_not_of(" \t");
            if (b == std::string::npos) continue;
            try {
                cfg.variants.push_back(parse_input_variant(item.substr(b, e - b + 1)));
            } catch (const ParseError& err) {
                throw ConfigError(std::string("sweep.variants: ") + err.what());
            }
        }
    } else {
        for (auto name : {"title", "article-first-10", "article-first-100", "article-middle-100", "article-last-100"}) {
            cfg.variants.push_back(parse_input_variant(name));
        }
    }

    auto& s = cfg.synth;
    s.n_days = r.number<std::size_t>("synth.n_days", s.n_days);
    s.items_per_day = r.number<std::size_t>("synth.items_per_day", s.items_per_day);
    s.relevance_rate = r.number<double>("synth.relevance_rate", s.relevance_rate);
    s.direction_accuracy = r.number<double>("synth.direction_accuracy", s.direction_accuracy);
    s.noise_direction_bias = r.number<double>("synth.noise_direction_bias", s.noise_direction_bias);
    s.seed = r.number<std::uint64_t>("synth.seed", s.seed);
    if (auto start = r.parsed("synth.start", parse_date)) s.start = *start;
    cfg.synth_out = r.path("synth.out");
    return cfg;
}

RunConfig load_run_config(const std::optional<std::filesystem::path>& path,
                          const std::vector<std::pair<std::string, std::string>>& overrides) {
    pt::ptree tree;
    std::filesystem::path base = std::filesystem::current_path();
    if (path) {
        if (!std::filesystem::exists(*path)) throw ValidationError("config file not found: " + path->string());
        try {
            pt::read_ini(path->string(), tree);
        } catch (const pt::ini_parser_error& e) {
            throw ConfigError(std::string("cannot parse config: ") + e.what());
        }
        base = std::filesystem::absolute(*path).parent_path();
    }
    // Paths given on the command line are relative to the working directory.
    static const std::set<std::string> path_keys = {
        "data.news",           "data.prices",         "prompts.template", "prompts.standard_template",
        "prompts.pool_standard", "prompts.pool_binary", "prompts.pool_ternary", "backend.cache",
        "backend.lexicon",     "backend.truth",       "output.dir",       "synth.out"};
    for (const auto& [key, value] : overrides) {
        if (path_keys.contains(key) && !value.empty()) {
            tree.put(key, std::filesystem::absolute(value).string());
        } else {
            tree.put(key, value);
        }
    }
    return make_run_config(std::move(tree), base);
}

}  // namespace trendvote
