#pragma once

#include <stdexcept>
#include <string>

namespace nestersolve {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violations: mismatched sizes, out-of-domain parameters.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical process left the finite range (overflow, NaN).
class Divergence : public Error {
 public:
  using Error::Error;
};

}  // namespace nestersolve
