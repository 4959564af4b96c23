#pragma once

#include <stdexcept>
#include <string>

namespace deanon {

// Invalid arguments supplied by the caller (out-of-range parameters,
// conflicting seed sets, unsupported options).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// No seed pair falls in any weight slice, so the staged matcher cannot start.
class UnreachableSeedsError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

// Malformed or unreadable input data (edge lists, caches, result files).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The exponent estimator has no finite answer for the given sample.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace deanon
