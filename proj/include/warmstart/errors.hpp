#pragma once

#include <stdexcept>
#include <string>

namespace warmstart {

/// Operands whose lengths or shapes do not agree.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A triangular factor with a zero on its diagonal.
class SingularMatrixError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Column-pivoted QR met a pivot column that is numerically zero.
class RankDeficientError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An operator that was supposed to be symmetric positive definite is not.
class SpdViolation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Parameters outside the range an operation accepts.
class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void require_same_length(std::size_t a, std::size_t b,
                                const char *what) {
  if (a != b)
    throw DimensionError(std::string(what) + ": length " + std::to_string(a) +
                         " does not match " + std::to_string(b));
}

} // namespace detail
} // namespace warmstart
