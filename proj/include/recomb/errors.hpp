#pragma once

#include <stdexcept>
#include <string>

namespace recomb {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input violated a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An enumeration or dense construction would exceed its configured size cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure stopped before reaching its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double final_deviation)
      : Error(what), final_deviation_(final_deviation) {}

  double final_deviation() const noexcept { return final_deviation_; }

 private:
  double final_deviation_;
};

}  // namespace recomb
