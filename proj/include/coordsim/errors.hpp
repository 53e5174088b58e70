#pragma once

#include <stdexcept>
#include <string>

namespace coordsim {

/// Invalid argument value (non-positive gain, out-of-range parameter, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Matrix/vector sizes that do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Scenario configuration that is malformed or violates a scenario invariant.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The switching certificate cannot be synthesized (e.g. family not jointly connected).
class SynthesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite state or an ill-conditioned solve.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace coordsim
