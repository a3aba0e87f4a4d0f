#pragma once

#include <stdexcept>
#include <string>

namespace gftmark {

/// Vector or matrix sizes that do not fit together, or a degenerate size.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or unsupported file contents.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gftmark
