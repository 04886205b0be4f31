#pragma once

#include <stdexcept>
#include <string>

namespace hypmass {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Point at a coordinate singularity of the slab chart (rho = 0, sphere poles).
struct SingularChartError : Error {
  using Error::Error;
};

// Metric or matrix failed symmetric positive-definite factorization.
struct NotPositiveDefiniteError : Error {
  using Error::Error;
};

// Invalid argument outside the chart-singularity case (e.g. point off the boundary).
struct DomainError : Error {
  using Error::Error;
};

struct DegenerateFitError : Error {
  using Error::Error;
};

// Non-finite integrand value, degenerate parameterization or failed refinement.
struct QuadratureError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace hypmass
