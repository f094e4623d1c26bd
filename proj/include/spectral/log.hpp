#pragma once

#include <functional>
#include <string>

namespace spectral {

enum class LogLevel { Debug = 0, Info = 1, Warning = 2, Quiet = 3 };

using LogSink = std::function<void(LogLevel, const std::string&)>;

// Default sink writes warnings to stderr. Replace it to capture messages in
// tests or to silence the library.
void set_log_sink(LogSink sink);
void set_log_level(LogLevel level);
LogLevel log_level();

void log(LogLevel level, const std::string& message);

inline void log_warning(const std::string& message) { log(LogLevel::Warning, message); }
inline void log_info(const std::string& message) { log(LogLevel::Info, message); }

}  // namespace spectral
