#pragma once

#include <string>

namespace dgpo {

enum class LogLevel { kDebug = 0, kInfo = 1, kWarn = 2 };

// Level comes from DGPO_LOG_LEVEL (debug|info|warn); defaults to info.
LogLevel log_level();

void log_debug(const std::string& msg);
void log_info(const std::string& msg);
void log_warn(const std::string& msg);

}  // namespace dgpo
