#pragma once

#include <iostream>
#include <string_view>

namespace hmc {

enum class LogLevel { quiet, warning, info };

inline LogLevel& log_level() {
    static LogLevel level = LogLevel::warning;
    return level;
}

inline void log_warning(std::string_view msg) {
    if (log_level() >= LogLevel::warning) std::clog << "warning: " << msg << '\n';
}

inline void log_info(std::string_view msg) {
    if (log_level() >= LogLevel::info) std::clog << msg << '\n';
}

} // namespace hmc
