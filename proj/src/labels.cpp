#include "trendvote/labels.hpp"

#include "trendvote/error.hpp"

#include <algorithm>
#include <cctype>

namespace trendvote {

std::string to_lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view to_string(ItemLabel label) {
    switch (label) {
        case ItemLabel::Up: return "Up";
        case ItemLabel::Down: return "Down";
        case ItemLabel::Irrelevant: return "Irrelevant";
    }
    return "?";
}

std::string_view to_string(TrendLabel label) {
    return label == TrendLabel::Up ? "Up" : "Down";
}

std::string_view to_string(LabelSet set) {
    return set == LabelSet::Binary ? "binary" : "ternary";
}

ItemLabel parse_item_label(std::string_view text) {
    const auto lower = to_lower(text);
    if (lower == "up") return ItemLabel::Up;
    if (lower == "down") return ItemLabel::Down;
    if (lower == "irrelevant") return ItemLabel::Irrelevant;
    throw ParseError("unknown label '" + std::string(text) + "'");
}

TrendLabel parse_trend_label(std::string_view text) {
    const auto lower = to_lower(text);
    if (lower == "up") return TrendLabel::Up;
    if (lower == "down") return TrendLabel::Down;
    throw ParseError("unknown trend label '" + std::string(text) + "'");
}

LabelSet parse_label_set(std::string_view text) {
    const auto lower = to_lower(text);
    if (lower == "binary" || lower == "2") return LabelSet::Binary;
    if (lower == "ternary" || lower == "3") return LabelSet::Ternary;
    throw ParseError("unknown label set '" + std::string(text) + "'");
}

bool contains(LabelSet set, ItemLabel label) {
    return label != ItemLabel::Irrelevant || set == LabelSet::Ternary;
}

std::vector<ItemLabel> labels_of(LabelSet set) {
    if (set == LabelSet::Binary) return {ItemLabel::Up, ItemLabel::Down};
    return {ItemLabel::Up, ItemLabel::Down, ItemLabel::Irrelevant};
}

std::optional<TrendLabel> to_trend_label(ItemLabel label) {
    switch (label) {
        case ItemLabel::Up: return TrendLabel::Up;
        case ItemLabel::Down: return TrendLabel::Down;
        case ItemLabel::Irrelevant: return std::nullopt;
    }
    return std::nullopt;
}

TrendLabel opposite(TrendLabel t) {
    return t == TrendLabel::Up ? TrendLabel::Down : TrendLabel::Up;
}

ItemLabel opposite(ItemLabel l) {
    switch (l) {
        case ItemLabel::Up: return ItemLabel::Down;
        case ItemLabel::Down: return ItemLabel::Up;
        case ItemLabel::Irrelevant: return ItemLabel::Irrelevant;
    }
    return l;
}

}  // namespace trendvote
