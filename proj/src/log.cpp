#include "trendvote/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace trendvote::log {

namespace {

std::mutex sink_mutex;
std::ostream* sink = &std::cerr;
std::atomic<Level> threshold{Level::Info};

std::string_view tag(Level level) {
    switch (level) {
        case Level::Debug: return "debug";
        case Level::Info: return "info";
        case Level::Warn: return "warn";
        case Level::Error: return "error";
        case Level::Off: break;
    }
    return "";
}

}  // namespace

void set_sink(std::ostream* s) {
    std::lock_guard lock(sink_mutex);
    sink = s;
}

void set_level(Level level) {
    threshold = level;
}

void write(Level level, std::string_view message) {
    if (level < threshold.load() || level == Level::Off) return;
    std::lock_guard lock(sink_mutex);
    if (sink) *sink << '[' << tag(level) << "] " << message << '\n';
}

}  // namespace trendvote::log
