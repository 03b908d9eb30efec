#include "trendvote/prompting.hpp"

#include "trendvote/error.hpp"
#include "trendvote/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <fstream>
#include <iostream>
#include <sstream>

namespace trendvote {

namespace {

constexpr std::string_view kInstructionKey = "{instruction}";
constexpr std::string_view kExemplarsKey = "{exemplars}";
constexpr std::string_view kQueryKey = "{query}";

std::size_t parse_count(std::string_view digits, std::string_view whole) {
    std::size_t n = 0;
    if (digits.empty()) throw ParseError("input variant '" + std::string(whole) + "' needs a token count");
    for (char c : digits) {
        if (c < '0' || c > '9') throw ParseError("bad token count in input variant '" + std::string(whole) + "'");
        n = n * 10 + static_cast<std::size_t>(c - '0');
    }
    if (n == 0) throw ConfigError("input variant '" + std::string(whole) + "' needs at least one token");
    return n;
}

}  // namespace

InputVariant parse_input_variant(std::string_view text) {
    const auto lower = to_lower(text);
    if (lower == "title") return {};
    static constexpr std::array<std::pair<std::string_view, InputVariant::Kind>, 4> prefixes{{
        {"article-first-", InputVariant::Kind::ArticleFirst},
        {"article-middle-", InputVariant::Kind::ArticleMiddle},
        {"article-last-", InputVariant::Kind::ArticleLast},
        {"article-summary-", InputVariant::Kind::ArticleSummary},
    }};
    for (const auto& [prefix, kind] : prefixes) {
        if (std::string_view(lower).starts_with(prefix)) {
            return {kind, parse_count(std::string_view(lower).substr(prefix.size()), text)};
        }
    }
    throw ConfigError("unknown input variant '" + std::string(text) + "'");
}

std::string to_string(const InputVariant& variant) {
    const auto n = std::to_string(variant.tokens);
    switch (variant.kind) {
        case InputVariant::Kind::Title: return "title";
        case InputVariant::Kind::ArticleFirst: return "article-first-" + n;
        case InputVariant::Kind::ArticleMiddle: return "article-middle-" + n;
        case InputVariant::Kind::ArticleLast: return "article-last-" + n;
        case InputVariant::Kind::ArticleSummary: return "article-summary-" + n;
    }
    return "?";
}

std::string extract_input(const NewsItem& item, const InputVariant& variant, const Tokenizer& tok,
                          const Summarizer* summarizer) {
    if (!variant.uses_article()) return item.title;
    if (!item.article) {
        throw ValidationError("news item '" + item.id + "' has no article for input variant " + to_string(variant));
    }
    const std::string& article = *item.article;
    const std::size_t n = variant.tokens;
    switch (variant.kind) {
        case InputVariant::Kind::ArticleFirst:
            return tok.slice(article, 0, n);
        case InputVariant::Kind::ArticleLast: {
            const std::size_t len = tok.count(article);
            return tok.slice(article, len > n ? len - n : 0, len);
        }
        case InputVariant::Kind::ArticleMiddle: {
            const std::size_t len = tok.count(article);
            if (len <= n) return tok.slice(article, 0, len);
            // Centered on len/2, shifted left when it would run past the end.
            std::size_t begin = len / 2 >= n / 2 ? len / 2 - n / 2 : 0;
            begin = std::min(begin, len - n);
            return tok.slice(article, begin, begin + n);
        }
        case InputVariant::Kind::ArticleSummary:
            if (summarizer == nullptr || !*summarizer) {
                throw ConfigError("input variant " + to_string(variant) + " needs a summarizing backend");
            }
            return truncate_tokens(tok, (*summarizer)(article, n), n);
        case InputVariant::Kind::Title:
            break;
    }
    return item.title;
}

std::vector<Exemplar> read_exemplar_pool(std::istream& in) {
    std::vector<Exemplar> pool;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("malformed exemplar: ") + e.what(), line_no);
        }
        if (!j.is_object() || !j.contains("text") || !j["text"].is_string() || !j.contains("label") ||
            !j["label"].is_string()) {
            throw ParseError("exemplar needs string fields 'text' and 'label'", line_no);
        }
        Exemplar ex{j["text"].get<std::string>(), ItemLabel::Up};
        if (ex.text.empty()) throw ParseError("empty exemplar text", line_no);
        try {
            ex.label = parse_item_label(j["label"].get<std::string>());
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line_no);
        }
        pool.push_back(std::move(ex));
    }
    return pool;
}

std::vector<Exemplar> load_exemplar_pool(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open exemplar pool " + path.string());
    return read_exemplar_pool(in);
}

std::vector<Exemplar> select_exemplars(const std::vector<Exemplar>& pool, std::size_t shots_per_class,
                                       LabelSet label_set, std::uint64_t seed) {
    for (const auto& ex : pool) {
        if (!contains(label_set, ex.label)) {
            throw ConfigError("exemplar pool contains label " + std::string(to_string(ex.label)) +
                              " outside the " + std::string(to_string(label_set)) + " label set");
        }
    }
    const auto classes = labels_of(label_set);
    std::vector<std::vector<const Exemplar*>> chosen;
    for (ItemLabel label : classes) {
        std::vector<const Exemplar*> members;
        for (const auto& ex : pool) {
            if (ex.label == label) members.push_back(&ex);
        }
        if (members.size() < shots_per_class) {
            throw ConfigError("exemplar pool has " + std::to_string(members.size()) + " " +
                              std::string(to_string(label)) + " exemplars, need " +
                              std::to_string(shots_per_class));
        }
        std::mt19937_64 rng(derive_seed(seed, to_string(label)));
        std::vector<const Exemplar*> picked;
        std::size_t needed = shots_per_class;
        std::size_t remaining = members.size();
        for (const Exemplar* ex : members) {
            if (needed == 0) break;
            if (uniform_below(rng, remaining) < needed) {
                picked.push_back(ex);
                --needed;
            }
            --remaining;
        }
        chosen.push_back(std::move(picked));
    }

    std::vector<Exemplar> out;
    out.reserve(shots_per_class * classes.size());
    for (std::size_t i = 0; i < shots_per_class; ++i) {
        for (const auto& per_class : chosen) out.push_back(*per_class[i]);
    }
    return out;
}

PromptTemplate::PromptTemplate(std::string text) : text_(std::move(text)) {
    for (auto key : {kInstructionKey, kExemplarsKey, kQueryKey}) {
        if (text_.find(key) == std::string::npos) {
            throw TemplateError("prompt template is missing placeholder " + std::string(key));
        }
    }
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open prompt template " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return PromptTemplate(buf.str());
}

PromptTemplate PromptTemplate::builtin() {
    return PromptTemplate("{instruction}\n\n{exemplars}{query}");
}

std::string PromptTemplate::render(std::string_view instruction, std::string_view exemplars,
                                   std::string_view query) const {
    std::string out;
    out.reserve(text_.size() + instruction.size() + exemplars.size() + query.size());
    std::size_t i = 0;
    while (i < text_.size()) {
        const std::string_view rest = std::string_view(text_).substr(i);
        if (rest.starts_with(kInstructionKey)) {
            out.append(instruction);
            i += kInstructionKey.size();
        } else if (rest.starts_with(kExemplarsKey)) {
            out.append(exemplars);
            i += kExemplarsKey.size();
        } else if (rest.starts_with(kQueryKey)) {
            out.append(query);
            i += kQueryKey.size();
        } else {
            out.push_back(text_[i++]);
        }
    }
    return out;
}

std::string instruction_for(LabelSet label_set) {
    if (label_set == LabelSet::Ternary) {
        return "Predict the impact of news passages on the stock trend into 3 classes: "
               "\"Up\", \"Down\" or \"Irrelevant\".";
    }
    return "Predict the impact of news passages on the stock trend into 2 classes: \"Up\" or \"Down\".";
}

std::string render_exemplar_block(const std::vector<Exemplar>& exemplars) {
    std::string out;
    for (const auto& ex : exemplars) {
        out += "Title: ";
        out += ex.text;
        out += "\nLabel: ";
        out += to_string(ex.label);
        out += "\n\n";
    }
    return out;
}

std::string render_query_block(std::string_view query) {
    std::string out = "Title: ";
    out.append(query);
    out += "\nLabel:";
    return out;
}

PromptSpec render_item_prompt(const PromptTemplate& tmpl, const std::vector<Exemplar>& exemplars,
                              std::string_view query, LabelSet label_set) {
    for (const auto& e : exemplars) {
        if (!contains(label_set, e.label)) {
            throw ConfigError("exemplar labeled " + std::string(to_string(e.label)) + " in a " +
                              std::string(to_string(label_set)) + " prompt");
        }
    }
    PromptSpec spec;
    spec.instruction = instruction_for(label_set);
    spec.exemplars = exemplars;
    spec.query = std::string(query);
    spec.label_set = label_set;
    spec.text = tmpl.render(spec.instruction, render_exemplar_block(exemplars), render_query_block(query));
    return spec;
}

std::string merge_texts(const std::vector<std::string>& texts, std::size_t count) {
    std::string out;
    for (std::size_t i = 0; i < count && i < texts.size(); ++i) {
        std::string_view t = texts[i];
        while (!t.empty() && (t.back() == '.' || t.back() == ' ')) t.remove_suffix(1);
        if (i > 0) out += "...";
        out.append(t);
    }
    return out;
}

StandardPrompt render_standard_prompt(const PromptTemplate& tmpl, const std::vector<Exemplar>& exemplars,
                                      const std::vector<std::string>& texts, std::size_t budget,
                                      const Tokenizer& tok) {
    if (texts.empty()) throw ValidationError("standard prompt needs at least one news text");
    const std::string instruction = instruction_for(LabelSet::Binary);
    const std::string exemplar_block = render_exemplar_block(exemplars);

    const std::size_t overhead = tok.count(tmpl.render(instruction, exemplar_block, render_query_block("")));
    if (overhead > budget) {
        throw ConfigError("token budget " + std::to_string(budget) + " is below the " +
                          std::to_string(overhead) + "-token instruction and exemplars");
    }

    StandardPrompt out;
    out.available = texts.size();
    std::string best;
    for (std::size_t r = 1; r <= texts.size(); ++r) {
        std::string rendered = tmpl.render(instruction, exemplar_block, render_query_block(merge_texts(texts, r)));
        const std::size_t n = tok.count(rendered);
        if (n > budget) break;
        out.retained = r;
        out.tokens = n;
        best = std::move(rendered);
    }
    if (out.retained == 0) {
        throw ConfigError("token budget " + std::to_string(budget) + " cannot fit a single news text");
    }
    out.spec.instruction = instruction;
    out.spec.exemplars = exemplars;
    out.spec.query = merge_texts(texts, out.retained);
    out.spec.label_set = LabelSet::Binary;
    out.spec.text = std::move(best);
    return out;
}

StandardPrompt render_standard_prompt(const PromptTemplate& tmpl, const std::vector<Exemplar>& exemplars,
                                      const PredictionInstance& instance, std::size_t budget,
                                      const Tokenizer& tok) {
    std::vector<std::string> titles;
    titles.reserve(instance.news.size());
    for (const auto& item : instance.news) titles.push_back(item.title);
    return render_standard_prompt(tmpl, exemplars, titles, budget, tok);
}

}  // namespace trendvote
