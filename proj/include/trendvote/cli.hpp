#pragma once

#include "trendvote/config.hpp"
#include "trendvote/pipeline.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace trendvote::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kValidation = 2, kAborted = 3 };

// Entry point shared by the executable and the tests. Never throws.
int run(int argc, const char* const argv[], std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// The commands below throw; run() maps exceptions to exit codes.

SplitResult load_dataset(const RunConfig& cfg);

// Backend per config; wrapped in the response cache when one is configured.
std::shared_ptr<Classifier> make_backend(const RunConfig& cfg);

PromptAssets make_prompts(const RunConfig& cfg, const MethodConfig& method);

void cmd_ingest(const RunConfig& cfg, std::ostream& out);

// Returns the prediction file written.
std::filesystem::path cmd_predict(const RunConfig& cfg, std::ostream& out);

enum class SweepAxis { Lambda, Shots, NewsCount, Variant };
SweepAxis parse_sweep_axis(std::string_view text);

// Returns the series file written.
std::filesystem::path cmd_sweep(const RunConfig& cfg, SweepAxis axis, std::ostream& out);

void cmd_eval(const RunConfig& cfg, const std::vector<std::filesystem::path>& files, std::ostream& out);

synth::SynthFiles cmd_synth(const RunConfig& cfg, std::ostream& out);

}  // namespace trendvote::cli
