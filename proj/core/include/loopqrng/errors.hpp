#pragma once

#include <stdexcept>
#include <string>

namespace loopqrng {

/// Malformed or inconsistent input data (files, streams, sidecars).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input too short for an estimator's block structure.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace loopqrng
