#pragma once

#include <stdexcept>
#include <string>

namespace caslif {

// Base class for everything thrown by this library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Arguments or file contents violate a documented precondition.
struct invalid_input_error : error {
  using error::error;
};

// Evaluation requested outside the mathematical domain of an operation
// (non-positive separation, shifted roughness separation <= 0, ...).
struct domain_error : error {
  using error::error;
};

// A model diverges at the requested frequency (metal permittivity at xi = 0).
struct divergence_error : error {
  using error::error;
};

// Quadrature or iteration failed to converge; message carries diagnostics.
struct numerical_error : error {
  using error::error;
};

// Nonlinear fit did not converge within the iteration cap.
struct fit_error : numerical_error {
  using numerical_error::numerical_error;
};

// Data-dependent analysis failure (no contact region, incompatible grids, ...).
struct analysis_error : error {
  using error::error;
};

}  // namespace caslif
