#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

namespace trendvote {

// Token counting and slicing used for budgets and article excerpts.
// Budgets are always relative to whichever tokenizer is configured.
class Tokenizer {
public:
    virtual ~Tokenizer() = default;

    virtual std::size_t count(std::string_view text) const = 0;

    // Tokens [begin, end) of text, re-joined; end is clamped to the length.
    virtual std::string slice(std::string_view text, std::size_t begin, std::size_t end) const = 0;
};

// Whitespace-delimited words. Adjacent slices are joined with a single space.
class WhitespaceTokenizer final : public Tokenizer {
public:
    std::size_t count(std::string_view text) const override;
    std::string slice(std::string_view text, std::size_t begin, std::size_t end) const override;
};

const Tokenizer& default_tokenizer();

// First n tokens under the given tokenizer.
std::string truncate_tokens(const Tokenizer& tok, std::string_view text, std::size_t n);

}  // namespace trendvote
