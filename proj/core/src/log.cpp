#include "asyncopt/log.hpp"

#include <iostream>
#include <mutex>
#include <set>
#include <string>

namespace asyncopt {

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

LogSink& current_sink() {
  // Repeated identical warnings are printed once.
  static LogSink sink = [seen = std::set<std::string>{}](LogLevel level,
                                                         std::string_view message) mutable {
    if (level == LogLevel::Info) return;
    if (level == LogLevel::Warning) {
      if (!seen.emplace(message).second) return;
      std::cerr << "warning: " << message << " (repeats suppressed)\n";
      return;
    }
    std::cerr << "error: " << message << '\n';
  };
  return sink;
}

}  // namespace

void set_log_sink(LogSink sink) {
  std::lock_guard lock(sink_mutex());
  current_sink() = std::move(sink);
}

void log(LogLevel level, std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (current_sink()) current_sink()(level, message);
}

}  // namespace asyncopt
