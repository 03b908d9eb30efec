#include "trendvote/lexicon.hpp"

#include "trendvote/error.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

namespace trendvote {

std::vector<std::string> lexicon_words(std::string_view text) {
    std::vector<std::string> words;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && !std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
        const std::size_t start = i;
        while (i < text.size() && std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
        if (start < i) words.push_back(to_lower(text.substr(start, i - start)));
    }
    return words;
}

Lexicon Lexicon::read(std::istream& in) {
    Lexicon lex;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::istringstream fields(line.substr(start));
        std::string weight_text;
        fields >> weight_text;
        double weight = 0.0;
        const char* b = weight_text.data();
        const char* e = b + weight_text.size();
        if (!weight_text.empty() && *b == '+') ++b;
        auto [ptr, ec] = std::from_chars(b, e, weight);
        if (ec != std::errc{} || ptr != e) throw ParseError("bad lexicon weight '" + weight_text + "'", line_no);
        std::string phrase;
        std::getline(fields, phrase);
        if (lexicon_words(phrase).empty()) throw ParseError("lexicon rule has no phrase", line_no);
        lex.add(phrase, weight);
    }
    return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open lexicon " + path.string());
    return read(in);
}

void Lexicon::add(std::string_view phrase, double weight) {
    auto words = lexicon_words(phrase);
    if (words.empty()) throw ValidationError("lexicon phrase has no words");
    rules_.push_back({std::move(words), weight});
}

namespace {

template <typename Fn>
void for_each_match(const std::vector<Lexicon::Rule>& rules, std::string_view text, Fn&& fn) {
    const auto words = lexicon_words(text);
    for (const auto& rule : rules) {
        const auto n = rule.words.size();
        for (std::size_t i = 0; i + n <= words.size(); ++i) {
            bool hit = true;
            for (std::size_t j = 0; j < n && hit; ++j) hit = words[i + j] == rule.words[j];
            if (hit) fn(rule);
        }
    }
}

}  // namespace

double Lexicon::score(std::string_view text) const {
    double total = 0.0;
    for_each_match(rules_, text, [&](const Rule& r) { total += r.weight; });
    return total;
}

std::size_t Lexicon::matches(std::string_view text) const {
    std::size_t n = 0;
    for_each_match(rules_, text, [&](const Rule&) { ++n; });
    return n;
}

ItemLabel LexiconClassifier::label_for(std::string_view text, LabelSet label_set) const {
    const double s = lexicon_.score(text);
    if (s < 0.0) return ItemLabel::Down;
    if (s > 0.0) return ItemLabel::Up;
    return label_set == LabelSet::Ternary ? ItemLabel::Irrelevant : ItemLabel::Up;
}

ClassifierResponse LexiconClassifier::classify(const ClassifierRequest& request) {
    validate(request);
    const std::string_view text = request.query.empty() ? std::string_view(request.prompt)
                                                        : std::string_view(request.query);
    ClassifierResponse response;
    response.raw = std::string(to_string(label_for(text, request.label_set)));
    response.label = parse_label(response.raw, request.label_set);
    response.source = ResponseSource::Lexicon;
    return response;
}

}  // namespace trendvote
