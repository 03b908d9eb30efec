#pragma once

#include "trendvote/corpus.hpp"
#include "trendvote/labels.hpp"
#include "trendvote/tokenizer.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace trendvote {

struct Exemplar {
    std::string text;
    ItemLabel label = ItemLabel::Up;
};

// Which text stands in for a news item: its title, a token slice of the
// article, or an article summary of at most `tokens` tokens.
struct InputVariant {
    enum class Kind { Title, ArticleFirst, ArticleMiddle, ArticleLast, ArticleSummary };

    Kind kind = Kind::Title;
    std::size_t tokens = 0;

    bool uses_article() const { return kind != Kind::Title; }
    bool operator==(const InputVariant&) const = default;
};

// "title", "article-first-100", "article-middle-100", "article-last-100", "article-summary-100".
InputVariant parse_input_variant(std::string_view text);
std::string to_string(const InputVariant& variant);

using Summarizer = std::function<std::string(std::string_view article, std::size_t n_tokens)>;

// Throws ValidationError for article variants on items without an article,
// and ConfigError for the summary variant when no summarizer is given.
std::string extract_input(const NewsItem& item, const InputVariant& variant, const Tokenizer& tok,
                          const Summarizer* summarizer = nullptr);

// Exemplar pool file: JSON Lines with `text` and `label`.
std::vector<Exemplar> read_exemplar_pool(std::istream& in);
std::vector<Exemplar> load_exemplar_pool(const std::filesystem::path& path);

// shots_per_class exemplars of each class in the set, interleaved Up, Down[, Irrelevant].
// Throws ConfigError if the pool holds a label outside the set or is short on a class.
std::vector<Exemplar> select_exemplars(const std::vector<Exemplar>& pool, std::size_t shots_per_class,
                                       LabelSet label_set, std::uint64_t seed);

// Prompt skeleton with {instruction}, {exemplars} and {query} placeholders.
// Substitution is single-pass, so placeholder-like text in news is left alone.
class PromptTemplate {
public:
    explicit PromptTemplate(std::string text);

    static PromptTemplate load(const std::filesystem::path& path);
    static PromptTemplate builtin();

    const std::string& text() const { return text_; }

    std::string render(std::string_view instruction, std::string_view exemplars,
                       std::string_view query) const;

private:
    std::string text_;
};

std::string instruction_for(LabelSet label_set);

// "Title: <text>\nLabel: <label>" blocks, each followed by a blank line.
std::string render_exemplar_block(const std::vector<Exemplar>& exemplars);
std::string render_query_block(std::string_view query);

struct PromptSpec {
    std::string instruction;
    std::vector<Exemplar> exemplars;
    std::string query;
    LabelSet label_set = LabelSet::Ternary;
    std::string text;  // fully rendered prompt
};

PromptSpec render_item_prompt(const PromptTemplate& tmpl, const std::vector<Exemplar>& exemplars,
                              std::string_view query, LabelSet label_set);

struct StandardPrompt {
    PromptSpec spec;
    std::size_t retained = 0;   // leading texts that fit the budget
    std::size_t available = 0;
    std::size_t tokens = 0;     // rendered size under the tokenizer
};

// Joins texts the way merged news is displayed ("a...b...c").
std::string merge_texts(const std::vector<std::string>& texts, std::size_t count);

// Binary prompt over the merged texts, dropping whole texts from the end
// until the rendered prompt fits in budget tokens.
StandardPrompt render_standard_prompt(const PromptTemplate& tmpl, const std::vector<Exemplar>& exemplars,
                                      const std::vector<std::string>& texts, std::size_t budget,
                                      const Tokenizer& tok);

StandardPrompt render_standard_prompt(const PromptTemplate& tmpl, const std::vector<Exemplar>& exemplars,
                                      const PredictionInstance& instance, std::size_t budget,
                                      const Tokenizer& tok);

}  // namespace trendvote
