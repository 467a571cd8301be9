#pragma once

#include <stdexcept>
#include <string>

namespace ddnm {

// Error taxonomy mirrors the process exit codes: config = 2, data = 3,
// anything else at runtime = 4.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ddnm
