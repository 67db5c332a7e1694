#pragma once

#include <stdexcept>
#include <string>

namespace lart {

/// Malformed or inconsistent on-disk data: bad magic, truncated streams,
/// missing files, schema violations.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A checkpoint or config whose tensor shapes do not match the model.
class ShapeMismatch : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace lart
