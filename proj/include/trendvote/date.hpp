#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace trendvote {

// Exchange-local calendar date; no intraday component.
using Date = std::chrono::sys_days;

// Strict YYYY-MM-DD; throws ParseError on anything else or on invalid dates.
Date parse_date(std::string_view text);
std::string format_date(Date d);

// Inclusive calendar range. A span with last < first is empty.
struct DateSpan {
    Date first;
    Date last;

    bool empty() const { return last < first; }
    bool contains(Date d) const { return !empty() && first <= d && d <= last; }
};

// Parses "YYYY-MM-DD..YYYY-MM-DD".
DateSpan parse_span(std::string_view text);
std::string format_span(const DateSpan& span);

}  // namespace trendvote
