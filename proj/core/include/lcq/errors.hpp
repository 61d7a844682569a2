#pragma once

#include <stdexcept>
#include <string>

namespace lcq {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameter value (negative weight, bad index, malformed spec...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(const std::string& what, std::size_t expected, std::size_t got);
};

/// A point lies outside the working box of a grid-form function.
class OutOfDomain : public Error {
 public:
  using Error::Error;
};

/// Grid samples fail the per-axis discrete convexity test.
class ConvexityViolation : public Error {
 public:
  using Error::Error;
};

/// The function is identically +inf.
class ImproperFunction : public Error {
 public:
  using Error::Error;
};

class GradientUnavailable : public Error {
 public:
  using Error::Error;
};

/// Mass outside the working box exceeds the configured tail budget.
class TailMassExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace lcq
