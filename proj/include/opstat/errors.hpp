#pragma once

#include <stdexcept>
#include <string>

namespace opstat {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad inputs: violated preconditions, malformed files, invalid configs.
struct ValidationError : Error {
  using Error::Error;
};

// Numerical trouble: solver non-convergence, ill-conditioned systems,
// violated construction tolerances. Messages carry the offending residual.
struct NumericError : Error {
  using Error::Error;
};

// A scalar function applied outside its domain (e.g. sqrt of a negative
// eigenvalue).
struct DomainError : Error {
  using Error::Error;
};

}  // namespace opstat
