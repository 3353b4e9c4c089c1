#pragma once

#include <string>

namespace spebt {

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

void set_log_level(LogLevel level);
LogLevel log_level();

// "[module] message" on stderr.
void log_info(const char* module, const std::string& message);
void log_debug(const char* module, const std::string& message);
void log_warn(const char* module, const std::string& message);

}  // namespace spebt
