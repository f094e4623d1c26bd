#include "spectral/log.hpp"

#include <iostream>
#include <mutex>

namespace spectral {
namespace {

std::mutex g_mutex;
LogLevel g_level = LogLevel::Warning;
LogSink g_sink = [](LogLevel level, const std::string& message) {
  std::clog << (level >= LogLevel::Warning ? "warning: " : "") << message << '\n';
};

}  // namespace

void set_log_sink(LogSink sink) {
  std::lock_guard lock(g_mutex);
  g_sink = std::move(sink);
}

void set_log_level(LogLevel level) {
  std::lock_guard lock(g_mutex);
  g_level = level;
}

LogLevel log_level() {
  std::lock_guard lock(g_mutex);
  return g_level;
}

void log(LogLevel level, const std::string& message) {
  std::lock_guard lock(g_mutex);
  if (level < g_level || !g_sink) return;
  g_sink(level, message);
}

}  // namespace spectral
