#include "trendvote/tokenizer.hpp"

#include <cctype>

namespace trendvote {

namespace {

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

template <typename Fn>
void for_each_word(std::string_view text, Fn&& fn) {
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        if (i == text.size()) break;
        const std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        if (!fn(text.substr(start, i - start))) return;
    }
}

}  // namespace

std::size_t WhitespaceTokenizer::count(std::string_view text) const {
    std::size_t n = 0;
    for_each_word(text, [&](std::string_view) {
        ++n;
        return true;
    });
    return n;
}

std::string WhitespaceTokenizer::slice(std::string_view text, std::size_t begin, std::size_t end) const {
    std::string out;
    std::size_t index = 0;
    for_each_word(text, [&](std::string_view word) {
        if (index >= end) return false;
        if (index >= begin) {
            if (!out.empty()) out += ' ';
            out.append(word);
        }
        ++index;
        return true;
    });
    return out;
}

const Tokenizer& default_tokenizer() {
    static const WhitespaceTokenizer tok;
    return tok;
}

std::string truncate_tokens(const Tokenizer& tok, std::string_view text, std::size_t n) {
    return tok.slice(text, 0, n);
}

}  // namespace trendvote
