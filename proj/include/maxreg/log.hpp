#pragma once

#include <string>

namespace maxreg::log {

// Level comes from MAXREG_LOG (error|info|debug), default error.
void init_from_env();
void info(const std::string& msg);
void warn(const std::string& msg);
void debug(const std::string& msg);

}  // namespace maxreg::log
