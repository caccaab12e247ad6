#pragma once

#include <stdexcept>
#include <string>

namespace daelstm {

/// Tensor or vector dimensions disagree with what an operation requires.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Malformed or unusable input data (files, sequences, datasets).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A configuration value violates a module precondition.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A pipeline stage was invoked before its prerequisites exist.
struct StagingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss or gradient.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require_shape(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

}  // namespace daelstm
