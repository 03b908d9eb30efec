#pragma once

#include "trendvote/backend.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace trendvote {

// Keyword phrases with signed weights. File format, one rule per line:
//   <weight> <phrase words...>     e.g.  "-2 fall most"
// Blank lines and lines starting with '#' are ignored.
class Lexicon {
public:
    struct Rule {
        std::vector<std::string> words;  // lower-cased
        double weight = 0.0;
    };

    static Lexicon read(std::istream& in);
    static Lexicon load(const std::filesystem::path& path);

    void add(std::string_view phrase, double weight);

    // Sum of weights over every phrase occurrence in text.
    double score(std::string_view text) const;

    // Number of rule occurrences in text.
    std::size_t matches(std::string_view text) const;

    const std::vector<Rule>& rules() const { return rules_; }

private:
    std::vector<Rule> rules_;
};

// Lower-cased alphanumeric word runs.
std::vector<std::string> lexicon_words(std::string_view text);

// Offline classifier that reads only the query text, never the exemplars.
// Ternary: sign of the score, Irrelevant at zero. Binary: Down when the
// score is negative, else Up.
class LexiconClassifier final : public Classifier {
public:
    explicit LexiconClassifier(Lexicon lexicon) : lexicon_(std::move(lexicon)) {}

    ClassifierResponse classify(const ClassifierRequest& request) override;

    ItemLabel label_for(std::string_view text, LabelSet label_set) const;

private:
    Lexicon lexicon_;
};

}  // namespace trendvote
