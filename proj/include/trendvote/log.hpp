#pragma once

#include <iosfwd>
#include <string_view>

namespace trendvote::log {

enum class Level { Debug, Info, Warn, Error, Off };

// Process-wide sink; defaults to std::cerr at Info.
void set_sink(std::ostream* sink);
void set_level(Level level);

void write(Level level, std::string_view message);

inline void debug(std::string_view m) { write(Level::Debug, m); }
inline void info(std::string_view m) { write(Level::Info, m); }
inline void warn(std::string_view m) { write(Level::Warn, m); }
inline void error(std::string_view m) { write(Level::Error, m); }

}  // namespace trendvote::log
