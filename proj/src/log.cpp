#include "maxreg/log.hpp"

#include <cstdlib>
#include <mutex>
#include <string_view>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace maxreg::log {
namespace {

std::shared_ptr<spdlog::logger> logger() {
    static std::once_flag once;
    static std::shared_ptr<spdlog::logger> lg;
    std::call_once(once, [] {
        lg = spdlog::stderr_color_mt("maxreg");
        lg->set_pattern("[%l] %v");
        lg->set_level(spdlog::level::err);
    });
    return lg;
}

}  // namespace

void init_from_env() {
    const char* v = std::getenv("MAXREG_LOG");
    auto lg = logger();
    if (!v) return;
    std::string_view s{v};
    if (s == "debug") lg->set_level(spdlog::level::debug);
    else if (s == "info") lg->set_level(spdlog::level::info);
    else lg->set_level(spdlog::level::err);
}

void info(const std::string& msg) { logger()->info(msg); }
void warn(const std::string& msg) { logger()->warn(msg); }
void debug(const std::string& msg) { logger()->debug(msg); }

}  // namespace maxreg::log
