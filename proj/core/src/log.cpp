#include "lipstream/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace lipstream {

LogLevel log_threshold() {
  static LogLevel level = [] {
    const char* env = std::getenv("LIPSTREAM_LOG");
    if (!env) return LogLevel::Warn;
    if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::Info;
    if (std::strcmp(env, "error") == 0) return LogLevel::Error;
    return LogLevel::Warn;
  }();
  return level;
}

void log_line(LogLevel level, const std::string& msg) {
  static std::mutex mu;
  static const char* names[] = {"debug", "info", "warn", "error"};
  std::lock_guard<std::mutex> lk(mu);
  std::fprintf(stderr, "[lipstream %s] %s\n",
               names[static_cast<int>(level)], msg.c_str());
}

}  // namespace lipstream
