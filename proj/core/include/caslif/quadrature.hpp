#pragma once

#include <cstddef>
#include <functional>

namespace caslif {

struct QuadratureOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-300;   // absolute floor, essentially off by default
  int max_panels = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int panels = 0;
};

// Adaptive panel integration of f on [a, b] using an embedded
// Gauss(7)/Kronrod(15) rule per panel. Panels whose error estimate exceeds
// the locally apportioned tolerance are bisected. Throws numerical_error with
// diagnostics when the panel cap is hit before the tolerance is met.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    const QuadratureOptions& opts = {});

}  // namespace caslif
