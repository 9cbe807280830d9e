#pragma once

#include <stdexcept>
#include <string>

namespace funkernel {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Grid construction violated an invariant (non-increasing points, too short).
struct InvalidGridError : Error {
  using Error::Error;
};

// Two objects that must share a grid or dimension do not.
struct IncompatibleError : Error {
  using Error::Error;
};

// Bad input data: NaN values, parse failures, referential-integrity holes.
struct DataError : Error {
  using Error::Error;
};

// Linear solver breakdown beyond jitter escalation.
struct NumericalError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace funkernel
