#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trendvote {

// Per-item classification outcome.
enum class ItemLabel { Up, Down, Irrelevant };

// Day-level price movement: Up iff the adjusted close strictly increased.
enum class TrendLabel { Up, Down };

// The two label sets a prompt can ask for.
enum class LabelSet { Binary, Ternary };

std::string_view to_string(ItemLabel label);
std::string_view to_string(TrendLabel label);
std::string_view to_string(LabelSet set);

// Case-insensitive; throws ParseError on unknown names.
ItemLabel parse_item_label(std::string_view text);
TrendLabel parse_trend_label(std::string_view text);
LabelSet parse_label_set(std::string_view text);

bool contains(LabelSet set, ItemLabel label);

// Canonical class order used for prompts: Up, Down[, Irrelevant].
std::vector<ItemLabel> labels_of(LabelSet set);

constexpr ItemLabel to_item_label(TrendLabel t) {
    return t == TrendLabel::Up ? ItemLabel::Up : ItemLabel::Down;
}

// Irrelevant has no trend.
std::optional<TrendLabel> to_trend_label(ItemLabel label);

TrendLabel opposite(TrendLabel t);
ItemLabel opposite(ItemLabel l);  // Irrelevant maps to itself

std::string to_lower(std::string_view text);

}  // namespace trendvote
