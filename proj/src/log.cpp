#include "bod/log.hpp"

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace bod {

void init_logging() {
  static bool initialized = false;
  if (!initialized) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("bod"));
    initialized = true;
  }
  auto level = spdlog::level::warn;
  if (const char* env = std::getenv("BOD_LOG"); env != nullptr && *env != '\0') {
    const auto parsed = spdlog::level::from_str(env);
    if (parsed != spdlog::level::off || std::string(env) == "off") level = parsed;
  }
  spdlog::set_level(level);
}

}  // namespace bod
