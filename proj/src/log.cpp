#include "smhgc/log.hpp"

#include <cstdlib>
#include <memory>
#include <string>

#include <spdlog/sinks/stdout_sinks.h>

namespace smhgc {

namespace {

spdlog::level::level_enum level_from_env() {
  const char* raw = std::getenv("SMHGC_LOG");
  const std::string level = raw ? raw : "info";
  if (level == "error") return spdlog::level::err;
  if (level == "debug") return spdlog::level::debug;
  return spdlog::level::info;
}

}  // namespace

spdlog::logger& log() {
  static const std::shared_ptr<spdlog::logger> logger = [] {
    auto sink = std::make_shared<spdlog::sinks::stderr_sink_mt>();
    auto l = std::make_shared<spdlog::logger>("smhgc", sink);
    l->set_pattern("[%l] %v");
    l->set_level(level_from_env());
    return l;
  }();
  return *logger;
}

}  // namespace smhgc
