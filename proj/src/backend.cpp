#include "trendvote/backend.hpp"

#include "trendvote/error.hpp"

#include <cctype>

namespace trendvote {

std::string_view to_string(ResponseSource source) {
    switch (source) {
        case ResponseSource::Remote: return "remote";
        case ResponseSource::Cache: return "cache";
        case ResponseSource::Lexicon: return "lexicon";
        case ResponseSource::Oracle: return "oracle";
    }
    return "?";
}

void validate(const ClassifierRequest& request) {
    if (request.prompt.empty()) throw ValidationError("classifier request has an empty prompt");
    if (request.model_id.empty()) throw ValidationError("classifier request has no model id");
    if (!(request.temperature >= 0.0 && request.temperature <= 2.0)) {
        throw ValidationError("temperature must lie in [0, 2]");
    }
}

ItemLabel parse_label(std::string_view raw, LabelSet label_set) {
    std::size_t i = 0;
    while (i < raw.size()) {
        while (i < raw.size() && !std::isalpha(static_cast<unsigned char>(raw[i]))) ++i;
        const std::size_t start = i;
        while (i < raw.size() && std::isalpha(static_cast<unsigned char>(raw[i]))) ++i;
        if (start == i) break;
        const auto word = to_lower(raw.substr(start, i - start));
        if (label_set == LabelSet::Ternary && word == "irrelevant") return ItemLabel::Irrelevant;
        if (word == "up") return ItemLabel::Up;
        if (word == "down") return ItemLabel::Down;
    }
    throw LabelParseError(std::string(raw));
}

std::string Classifier::summarize_text(std::string_view, std::size_t) {
    throw ConfigError("backend cannot summarize");
}

std::string summarize(std::string_view article, std::size_t n_tokens, Classifier* backend, const Tokenizer& tok) {
    if (backend == nullptr || !backend->can_summarize()) {
        throw ConfigError("summary input variant needs a summarizing backend");
    }
    if (tok.count(article) == 0) return {};
    return truncate_tokens(tok, backend->summarize_text(article, n_tokens), n_tokens);
}

}  // namespace trendvote
