#pragma once

#include <functional>
#include <string_view>

namespace asyncopt {

enum class LogLevel { Info, Warning, Error };

using LogSink = std::function<void(LogLevel, std::string_view)>;

/// Replaces the process-wide sink (default: stderr, warnings and errors only,
/// each distinct warning printed once).
/// Passing an empty function silences logging.
void set_log_sink(LogSink sink);

void log(LogLevel level, std::string_view message);

inline void log_info(std::string_view message) { log(LogLevel::Info, message); }
inline void log_warning(std::string_view message) { log(LogLevel::Warning, message); }
inline void log_error(std::string_view message) { log(LogLevel::Error, message); }

}  // namespace asyncopt
