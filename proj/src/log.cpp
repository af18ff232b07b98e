#include "dgpo/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace dgpo {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("DGPO_LOG_LEVEL");
    if (env == nullptr) return LogLevel::kInfo;
    const std::string v(env);
    if (v == "debug") return LogLevel::kDebug;
    if (v == "info") return LogLevel::kInfo;
    if (v == "warn") return LogLevel::kWarn;
    std::cerr << "[warn] unknown DGPO_LOG_LEVEL '" << v << "', using info\n";
    return LogLevel::kInfo;
  }();
  return level;
}

namespace {

std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}

void emit(LogLevel at, const char* tag, const std::string& msg) {
  if (static_cast<int>(at) < static_cast<int>(log_level())) return;
  std::lock_guard<std::mutex> lock(log_mutex());
  std::cerr << "[" << tag << "] " << msg << "\n";
}

}  // namespace

void log_debug(const std::string& msg) { emit(LogLevel::kDebug, "debug", msg); }
void log_info(const std::string& msg) { emit(LogLevel::kInfo, "info", msg); }
void log_warn(const std::string& msg) { emit(LogLevel::kWarn, "warn", msg); }

}  // namespace dgpo
