#include "spebt/log.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>

namespace spebt {

namespace {
std::atomic<int> g_level{static_cast<int>(LogLevel::Info)};
std::mutex g_mutex;

void emit(const char* tag, const char* module, const std::string& message) {
    std::lock_guard<std::mutex> lock(g_mutex);
    std::fprintf(stderr, "%s[%s] %s\n", tag, module, message.c_str());
}
}  // namespace

void set_log_level(LogLevel level) { g_level = static_cast<int>(level); }
LogLevel log_level() { return static_cast<LogLevel>(g_level.load()); }

void log_info(const char* module, const std::string& message) {
    if (g_level >= static_cast<int>(LogLevel::Info)) emit("", module, message);
}

void log_debug(const char* module, const std::string& message) {
    if (g_level >= static_cast<int>(LogLevel::Debug)) emit("", module, message);
}

void log_warn(const char* module, const std::string& message) {
    if (g_level >= static_cast<int>(LogLevel::Info)) emit("warning: ", module, message);
}

}  // namespace spebt
