#pragma once

#include <sstream>
#include <string>

namespace lipstream {

// Tiny stderr logger. Verbosity from LIPSTREAM_LOG (debug|info|warn|error),
// default warn. stdout stays reserved for CLI human output.
enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Error = 3 };

LogLevel log_threshold();
void log_line(LogLevel level, const std::string& msg);

template <typename... Args>
void log_at(LogLevel level, const Args&... args) {
  if (level < log_threshold()) return;
  std::ostringstream os;
  (os << ... << args);
  log_line(level, os.str());
}

template <typename... Args>
void log_debug(const Args&... args) { log_at(LogLevel::Debug, args...); }
template <typename... Args>
void log_info(const Args&... args) { log_at(LogLevel::Info, args...); }
template <typename... Args>
void log_warn(const Args&... args) { log_at(LogLevel::Warn, args...); }
template <typename... Args>
void log_error(const Args&... args) { log_at(LogLevel::Error, args...); }

}  // namespace lipstream
