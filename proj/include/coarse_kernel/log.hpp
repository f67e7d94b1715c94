#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace ck::log {

enum class level : int { off = 0, info = 1, debug = 2 };

/// Log level comes from COARSE_KERNEL_LOG (off|info|debug), default off.
inline level threshold() {
    static level lv = [] {
        const char* env = std::getenv("COARSE_KERNEL_LOG");
        if (!env) return level::off;
        if (std::strcmp(env, "debug") == 0) return level::debug;
        if (std::strcmp(env, "info") == 0) return level::info;
        return level::off;
    }();
    return lv;
}

inline void info(const std::string& msg) {
    if (threshold() >= level::info) std::fprintf(stderr, "[coarse-kernel] %s\n", msg.c_str());
}

inline void debug(const std::string& msg) {
    if (threshold() >= level::debug) std::fprintf(stderr, "[coarse-kernel:debug] %s\n", msg.c_str());
}

} // namespace ck::log
