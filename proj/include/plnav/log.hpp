#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace plnav {

/// Verbosity is controlled through the PLNAV_LOG environment variable only
/// ("debug", "info", "warn", default info).
inline int log_level() {
  static int level = [] {
    const char* env = std::getenv("PLNAV_LOG");
    if (env == nullptr) return 1;
    if (std::strcmp(env, "debug") == 0) return 0;
    if (std::strcmp(env, "warn") == 0) return 2;
    return 1;
  }();
  return level;
}

inline void log_debug(const std::string& msg) {
  if (log_level() <= 0) std::fprintf(stderr, "[debug] %s\n", msg.c_str());
}

inline void log_info(const std::string& msg) {
  if (log_level() <= 1) std::fprintf(stderr, "[info] %s\n", msg.c_str());
}

inline void log_warn(const std::string& msg) {
  std::fprintf(stderr, "[warn] %s\n", msg.c_str());
}

}  // namespace plnav
