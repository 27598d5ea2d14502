#pragma once

#include <stdexcept>
#include <string>

namespace kappa4 {

// Bad caller input: non-finite values, out-of-range probabilities, too few observations.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// Data with no dispersion (all observations equal).
class DegenerateError : public std::domain_error {
 public:
  explicit DegenerateError(const std::string& what) : std::domain_error(what) {}
};

// Population L-moments do not exist for the requested shape parameters.
class NonexistentMomentError : public std::domain_error {
 public:
  explicit NonexistentMomentError(const std::string& what) : std::domain_error(what) {}
};

// Invalid simulation / run configuration.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace kappa4
