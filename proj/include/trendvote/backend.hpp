#pragma once

#include "trendvote/labels.hpp"
#include "trendvote/tokenizer.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace trendvote {

struct ClassifierRequest {
    std::string model_id;
    double temperature = 0.0;
    std::string prompt;
    LabelSet label_set = LabelSet::Ternary;

    // Routing hints for offline backends. Neither is part of the cache key:
    // `query` is the text being classified (already inside the prompt) and
    // `item_id` names the news item for per-item requests.
    std::string query;
    std::optional<std::string> item_id;
};

enum class ResponseSource { Remote, Cache, Lexicon, Oracle };

std::string_view to_string(ResponseSource source);

struct ClassifierResponse {
    std::string raw;
    ItemLabel label = ItemLabel::Irrelevant;
    ResponseSource source = ResponseSource::Remote;
};

// Throws ValidationError unless the request is well-formed.
void validate(const ClassifierRequest& request);

// Whole-word, case-insensitive scan for the label names in the set; the
// earliest occurrence wins. Throws LabelParseError carrying raw otherwise.
ItemLabel parse_label(std::string_view raw, LabelSet label_set);

// Implementations must be safe to call concurrently.
class Classifier {
public:
    virtual ~Classifier() = default;

    virtual ClassifierResponse classify(const ClassifierRequest& request) = 0;

    virtual bool can_summarize() const { return false; }
    virtual std::string summarize_text(std::string_view article, std::size_t n_tokens);
};

// Backend summary of article cut to n_tokens under tok. Empty article gives
// an empty summary; a null or non-summarizing backend is a ConfigError.
std::string summarize(std::string_view article, std::size_t n_tokens, Classifier* backend,
                      const Tokenizer& tok = default_tokenizer());

}  // namespace trendvote
