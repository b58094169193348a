#pragma once

#include <functional>
#include <vector>

namespace caslif {

struct LinearFit {
  double slope;
  double intercept;
  double residual_rms;
};

// Ordinary least-squares line y = slope*x + intercept.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct LevMarOptions {
  int max_iterations = 200;
  double gradient_tol = 1e-12;   // stop when |J^T r|_inf below this
  double step_tol = 1e-14;       // stop on relative step size below this
  double lambda0 = 1e-3;
};

struct LevMarResult {
  std::vector<double> params;
  std::vector<double> sigma;     // 1-sigma parameter uncertainties
  std::vector<double> residuals; // final residual vector
  double chi2 = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Damped least squares for small dense problems. residual(p, r) fills the
// residual vector; jacobian(p, J) fills J in row-major order (n_res x n_par),
// or pass nullptr to use forward differences. Throws fit_error when the
// iteration cap is reached without convergence (message carries the step
// trace). Parameter uncertainties come from chi2/(n-p) * (J^T J)^-1.
LevMarResult levenberg_marquardt(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>&
        residual,
    const std::function<void(const std::vector<double>&, std::vector<double>&)>&
        jacobian,
    std::vector<double> initial, std::size_t n_residuals,
    const LevMarOptions& opts = {});

}  // namespace caslif
