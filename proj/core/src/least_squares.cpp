#include "caslif/least_squares.hpp"

#include <cmath>
#include <sstream>

#include "caslif/errors.hpp"

namespace caslif {

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw invalid_input_error("line fit needs >= 2 matching points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw invalid_input_error("degenerate abscissae in line fit");
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (slope * x[i] + intercept);
    ss += r * r;
  }
  return {slope, intercept, std::sqrt(ss / n)};
}

namespace {

// Solve the symmetric positive(ish)-definite system A x = b in place by
// Gaussian elimination with partial pivoting; n is small (2-4 parameters).
bool solve_dense(std::vector<double>& A, std::vector<double>& b, std::size_t n) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(A[r * n + col]) > std::fabs(A[piv * n + col])) piv = r;
    }
    if (A[piv * n + col] == 0.0) return false;
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(A[piv * n + c], A[col * n + c]);
      std::swap(b[piv], b[col]);
    }
    const double d = A[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = A[r * n + col] / d;
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) A[r * n + c] -= f * A[col * n + c];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t ri = n; ri-- > 0;) {
    double acc = b[ri];
    for (std::size_t c = ri + 1; c < n; ++c) acc -= A[ri * n + c] * b[c];
    b[ri] = acc / A[ri * n + ri];
  }
  return true;
}

// (J^T J)^-1 for the covariance estimate; small n, plain inversion by solving
// against unit vectors.
std::vector<double> invert_jtj(const std::vector<double>& jtj, std::size_t n) {
  std::vector<double> inv(n * n, 0.0);
  for (std::size_t col = 0; col < n; ++col) {
    std::vector<double> a = jtj;
    std::vector<double> e(n, 0.0);
    e[col] = 1.0;
    if (!solve_dense(a, e, n)) return {};
    for (std::size_t r = 0; r < n; ++r) inv[r * n + col] = e[r];
  }
  return inv;
}

}  // namespace

LevMarResult levenberg_marquardt(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>&
        residual,
    const std::function<void(const std::vector<double>&, std::vector<double>&)>&
        jacobian,
    std::vector<double> initial, std::size_t n_residuals,
    const LevMarOptions& opts) {
  const std::size_t np = initial.size();
  if (np == 0 || n_residuals < np) {
    throw invalid_input_error("levenberg_marquardt needs params and n_res >= n_par");
  }

  std::vector<double> p = std::move(initial);
  std::vector<double> r(n_residuals), r_try(n_residuals);
  std::vector<double> J(n_residuals * np);
  std::ostringstream trace;

  auto chi2_of = [](const std::vector<double>& res) {
    double s = 0.0;
    for (double v : res) s += v * v;
    return s;
  };

  auto fill_jacobian = [&](const std::vector<double>& at) {
    if (jacobian) {
      jacobian(at, J);
      return;
    }
    // forward differences
    std::vector<double> base(n_residuals), bumped(n_residuals);
    residual(at, base);
    std::vector<double> q = at;
    for (std::size_t j = 0; j < np; ++j) {
      const double h = 1e-7 * std::max(1.0, std::fabs(at[j]));
      q[j] = at[j] + h;
      residual(q, bumped);
      q[j] = at[j];
      for (std::size_t i = 0; i < n_residuals; ++i) {
        J[i * np + j] = (bumped[i] - base[i]) / h;
      }
    }
  };

  residual(p, r);
  double chi2 = chi2_of(r);
  double lambda = opts.lambda0;

  LevMarResult out;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    fill_jacobian(p);

    std::vector<double> jtj(np * np, 0.0), jtr(np, 0.0);
    for (std::size_t i = 0; i < n_residuals; ++i) {
      for (std::size_t a = 0; a < np; ++a) {
        jtr[a] += J[i * np + a] * r[i];
        for (std::size_t b = a; b < np; ++b) {
          jtj[a * np + b] += J[i * np + a] * J[i * np + b];
        }
      }
    }
    for (std::size_t a = 0; a < np; ++a) {
      for (std::size_t b = 0; b < a; ++b) jtj[a * np + b] = jtj[b * np + a];
    }

    double gmax = 0.0;
    for (double g : jtr) gmax = std::max(gmax, std::fabs(g));
    if (gmax < opts.gradient_tol) {
      out.converged = true;
      out.iterations = it;
      break;
    }

    bool stepped = false;
    for (int attempt = 0; attempt < 40 && !stepped; ++attempt) {
      std::vector<double> A = jtj;
      for (std::size_t a = 0; a < np; ++a) {
        A[a * np + a] += lambda * jtj[a * np + a];
      }
      std::vector<double> step = jtr;
      for (double& s : step) s = -s;
      if (!solve_dense(A, step, np)) {
        lambda *= 10.0;
        continue;
      }
      std::vector<double> p_try = p;
      double rel_step = 0.0;
      for (std::size_t a = 0; a < np; ++a) {
        p_try[a] += step[a];
        rel_step = std::max(rel_step, std::fabs(step[a]) /
                                          std::max(1e-30, std::fabs(p[a])));
      }
      residual(p_try, r_try);
      const double chi2_try = chi2_of(r_try);
      trace << "it=" << it << " lambda=" << lambda << " chi2=" << chi2_try
            << "\n";
      if (chi2_try <= chi2) {
        p = std::move(p_try);
        r = r_try;
        const bool tiny = rel_step < opts.step_tol;
        const bool flat = chi2 - chi2_try <= 1e-14 * std::max(chi2, 1e-300);
        chi2 = chi2_try;
        lambda = std::max(lambda * 0.3, 1e-14);
        stepped = true;
        if (tiny || flat) {
          out.converged = true;
          out.iterations = it;
        }
      } else {
        lambda *= 10.0;
      }
    }
    if (!stepped || out.converged) {
      if (stepped) break;
      // could not find a descending step at any damping
      out.converged = chi2 == 0.0;
      out.iterations = it;
      break;
    }
    if (it == opts.max_iterations) {
      std::ostringstream msg;
      msg << "nonlinear fit did not converge in " << opts.max_iterations
          << " iterations; step trace:\n"
          << trace.str();
      throw fit_error(msg.str());
    }
  }
  if (!out.converged) {
    std::ostringstream msg;
    msg << "nonlinear fit stalled; step trace:\n" << trace.str();
    throw fit_error(msg.str());
  }

  // covariance from the final Jacobian
  fill_jacobian(p);
  std::vector<double> jtj(np * np, 0.0);
  for (std::size_t i = 0; i < n_residuals; ++i) {
    for (std::size_t a = 0; a < np; ++a) {
      for (std::size_t b = a; b < np; ++b) {
        jtj[a * np + b] += J[i * np + a] * J[i * np + b];
      }
    }
  }
  for (std::size_t a = 0; a < np; ++a) {
    for (std::size_t b = 0; b < a; ++b) jtj[a * np + b] = jtj[b * np + a];
  }
  out.sigma.assign(np, 0.0);
  const auto inv = invert_jtj(jtj, np);
  if (!inv.empty() && n_residuals > np) {
    const double s2 = chi2 / static_cast<double>(n_residuals - np);
    for (std::size_t a = 0; a < np; ++a) {
      out.sigma[a] = std::sqrt(std::max(0.0, s2 * inv[a * np + a]));
    }
  }
  out.params = std::move(p);
  out.residuals = std::move(r);
  out.chi2 = chi2;
  return out;
}

}  // namespace caslif
