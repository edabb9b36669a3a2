#pragma once

#include <stdexcept>
#include <string>

namespace mwlab {

/// Invalid construction parameters or experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation whose preconditions fail on the supplied data
/// (zero inputs, grid mismatches, failed audits).
class ComputeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mwlab
