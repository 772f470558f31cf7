#pragma once

#include <stdexcept>

namespace rflab {

// File, schema and id-resolution problems.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Degenerate numeric states the algorithms cannot recover from.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rflab
