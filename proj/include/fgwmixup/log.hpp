#pragma once

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <memory>
#include <string>

namespace fgw {

/// Shared stderr logger; level comes from FGWMIXUP_LOG (error|info|debug), default info.
inline spdlog::logger& logger() {
    static const std::shared_ptr<spdlog::logger> instance = [] {
        auto lg = spdlog::stderr_color_mt("fgwmixup");
        lg->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
        const char* env = std::getenv("FGWMIXUP_LOG");
        const std::string level = env ? env : "info";
        if (level == "error") {
            lg->set_level(spdlog::level::err);
        } else if (level == "debug") {
            lg->set_level(spdlog::level::debug);
        } else {
            lg->set_level(spdlog::level::info);
        }
        return lg;
    }();
    return *instance;
}

}  // namespace fgw
