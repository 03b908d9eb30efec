#pragma once

#include "trendvote/corpus.hpp"
#include "trendvote/pipeline.hpp"
#include "trendvote/remote.hpp"
#include "trendvote/synthlab.hpp"

#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace trendvote {

enum class BackendKind { Remote, Lexicon, Oracle, Replay };

std::string_view to_string(BackendKind kind);
BackendKind parse_backend_kind(std::string_view text);

// Everything one CLI invocation needs. Built from an INI-style file whose
// keys are addressed as "section.key"; any key can be overridden by a
// command-line flag of the same dotted name. Relative paths resolve against
// the config file's directory.
struct RunConfig {
    boost::property_tree::ptree tree;  // after overrides, for echoing into reports
    std::filesystem::path base_dir;

    std::optional<std::filesystem::path> news_path;
    std::optional<std::filesystem::path> prices_path;
    std::optional<std::string> ticker;
    std::optional<SplitSpans> spans;
    SplitName split = SplitName::Test;
    bool split_set = false;

    MethodConfig method;

    std::optional<std::filesystem::path> item_template;
    std::optional<std::filesystem::path> standard_template;
    std::optional<std::filesystem::path> pool_standard;
    std::optional<std::filesystem::path> pool_binary;
    std::optional<std::filesystem::path> pool_ternary;

    BackendKind backend = BackendKind::Lexicon;
    std::optional<std::filesystem::path> cache_path;
    std::optional<std::filesystem::path> lexicon_path;
    std::optional<std::filesystem::path> truth_path;
    double relevance_error = 0.0;
    double direction_error = 0.0;
    std::uint64_t oracle_seed = 0;
    RemoteConfig remote;

    std::filesystem::path out_dir = "out";
    TrendLabel positive_class = TrendLabel::Up;

    std::vector<double> lambda_grid = default_lambda_grid();
    std::vector<std::size_t> shots_grid = {0, 3, 6, 9, 12};
    std::vector<std::size_t> news_counts = {10, 20, 30, 40, 60, 80};
    std::vector<InputVariant> variants;

    synth::SynthConfig synth;
    std::optional<std::filesystem::path> synth_out;

    // Flat "section.key" -> value echo of the effective configuration.
    nlohmann::ordered_json echo() const;
};

// Throws ConfigError (bad values) or ValidationError (unreadable file).
RunConfig load_run_config(const std::optional<std::filesystem::path>& path,
                          const std::vector<std::pair<std::string, std::string>>& overrides = {});

RunConfig make_run_config(boost::property_tree::ptree tree, std::filesystem::path base_dir);

}  // namespace trendvote
