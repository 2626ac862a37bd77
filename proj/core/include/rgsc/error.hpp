#pragma once

#include <stdexcept>
#include <string>

namespace rgsc {

// Invalid configuration or mismatched inputs the user can fix. The CLI maps
// this to exit code 2, everything else to exit code 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A caller broke a documented precondition (e.g. applying an illegal move).
struct ContractViolation : std::logic_error {
  explicit ContractViolation(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace rgsc
