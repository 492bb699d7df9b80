#pragma once

#include <stdexcept>
#include <string>

namespace bblab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Jet arithmetic outside the domain of a primitive (division by zero, sqrt of a nonpositive value).
struct DomainError : Error {
  using Error::Error;
};

struct DegenerateImmersion : Error {
  using Error::Error;
};

struct NotConformal : Error {
  using Error::Error;
};

/// The attractor requested for a theorem evaluation is not a normalized conformal attractor of the surface.
struct AttractorNotAdmissible : Error {
  using Error::Error;
};

struct OutsideTube : Error {
  using Error::Error;
};

struct LeftDomain : Error {
  using Error::Error;
};

struct StepFailure : Error {
  using Error::Error;
};

struct ZeroDerivative : Error {
  using Error::Error;
};

/// Malformed user input (unknown registry key, bad parameter, bad list). Raised before any computation.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace bblab
