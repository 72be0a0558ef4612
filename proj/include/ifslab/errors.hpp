#pragma once

#include <stdexcept>
#include <string>

namespace ifslab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An inverse was requested from a map that is not a bijection.
class NonInvertible : public Error {
 public:
  using Error::Error;
};

/// A derivative was requested at a breakpoint of a piecewise-linear map.
class NotDifferentiable : public Error {
 public:
  NotDifferentiable(const std::string& what, double left_slope, double right_slope)
      : Error(what), left(left_slope), right(right_slope) {}
  double left;
  double right;
};

/// A detector's hypothesis is not met at the requested resolution.
class NotApplicable : public Error {
 public:
  using Error::Error;
};

class NotLocallyExpanding : public Error {
 public:
  NotLocallyExpanding(const std::string& what, double stuck_point)
      : Error(what), point(stuck_point) {}
  double point;
};

class NotACover : public Error {
 public:
  NotACover(const std::string& what, double uncovered_point)
      : Error(what), point(uncovered_point) {}
  double point;
};

class UnknownExample : public Error {
 public:
  using Error::Error;
};

/// Malformed input: bad parameters, bad system files, bad property names.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

}  // namespace ifslab
