#pragma once

#include <spdlog/spdlog.h>

namespace smhgc {

// Returns the library logger (stderr). Its level comes from SMHGC_LOG
// (error | info | debug), defaulting to info.
spdlog::logger& log();

}  // namespace smhgc
