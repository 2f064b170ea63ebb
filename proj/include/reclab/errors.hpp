#pragma once

#include <stdexcept>
#include <string>

namespace reclab {

// Error taxonomy mirrored by the CLI exit codes (see tools/reclab.cpp).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct CapExceededError : std::runtime_error {
  explicit CapExceededError(const std::string& what) : std::runtime_error(what) {}
};

struct NonConvergenceError : std::runtime_error {
  explicit NonConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace reclab
