#include "trendvote/date.hpp"

#include "trendvote/error.hpp"

#include <cctype>
#include <cstdio>

namespace trendvote {

namespace {

int digits(std::string_view s, std::size_t pos, std::size_t len) {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return -1;
        v = v * 10 + (s[i] - '0');
    }
    return v;
}

}  // namespace

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw ParseError("expected YYYY-MM-DD date, got '" + std::string(text) + "'");
    }
    const int y = digits(text, 0, 4);
    const int m = digits(text, 5, 2);
    const int d = digits(text, 8, 2);
    if (y < 0 || m < 0 || d < 0) {
        throw ParseError("expected YYYY-MM-DD date, got '" + std::string(text) + "'");
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y},
                                          std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw ParseError("invalid calendar date '" + std::string(text) + "'");
    return Date{ymd};
}

std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

DateSpan parse_span(std::string_view text) {
    const auto sep = text.find("..");
    if (sep == std::string_view::npos) {
        throw ParseError("expected date span FIRST..LAST, got '" + std::string(text) + "'");
    }
    return {parse_date(text.substr(0, sep)), parse_date(text.substr(sep + 2))};
}

std::string format_span(const DateSpan& span) {
    return format_date(span.first) + ".." + format_date(span.last);
}

}  // namespace trendvote
