#pragma once

#include <stdexcept>
#include <string>

namespace lno {

/// Incompatible extents, channel counts, or configuration values.
class ShapeError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed, truncated, or version-mismatched files.
class FormatError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Divergence, non-finite values, or solver non-convergence.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace lno
