#include "caslif/dielectrics.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <unordered_map>
#include <variant>

#include "caslif/constants.hpp"
#include "caslif/errors.hpp"

namespace caslif {

namespace {

// g(u) = (1 - arctan(u)/u)/u^2, the kernel behind the stable forms of the
// arctan differences below. Series for small u where the direct expression
// cancels catastrophically.
double atan_deficit(double u) {
  const double u2 = u * u;
  if (u2 < 1e-4) {
    return (1.0 / 3.0) - u2 / 5.0 + u2 * u2 / 7.0 - u2 * u2 * u2 / 9.0;
  }
  return (1.0 - std::atan(u) / u) / u2;
}

// integral over [a, b] of x * (alpha + beta x) / (x^2 + xi^2) dx,
// with alpha + beta*x the linear interpolant of Im[eps] on the segment.
// Evaluated in closed form so no quadrature error concentrates near x ~ xi.
double segment_integral(double a, double b, double alpha, double beta,
                        double xi) {
  if (b <= a) return 0.0;
  if (xi == 0.0) {
    // Im[eps](0) = 0 is required when a = 0, i.e. alpha = 0 on that segment.
    const double t_alpha = (a > 0.0) ? alpha * std::log(b / a) : 0.0;
    return t_alpha + beta * (b - a);
  }
  const double xi2 = xi * xi;
  const double t_alpha =
      0.5 * alpha * std::log1p((b * b - a * a) / (a * a + xi2));
  // beta * [(b-a) - xi*(atan(b/xi)-atan(a/xi))], written cancellation-free:
  const double w = (b - a) * xi / (xi2 + a * b);
  const double s = a * b / (xi2 + a * b);
  const double t = w * w * atan_deficit(w);
  const double t_beta = beta * (b - a) * (s + t - s * t);
  return t_alpha + t_beta;
}

// integral over [0, xc] of the Drude Im[eps] against the transform weight:
// Im[eps](x) = wp^2 g / (x (x^2 + g^2)), so the integrand is
// wp^2 g / ((x^2 + g^2)(x^2 + xi^2)); closed form via partial fractions.
double drude_region_integral(double xc, double wp, double g, double xi) {
  if (xc <= 0.0) return 0.0;
  if (xi == 0.0) {
    throw divergence_error("Drude-tailed permittivity diverges at xi = 0");
  }
  const double pref = wp * wp * g;
  if (std::fabs(xi - g) < 1e-6 * g) {
    // degenerate xi ~ g case
    return pref * (xc / (2.0 * g * g * (xc * xc + g * g)) +
                   std::atan(xc / g) / (2.0 * g * g * g));
  }
  const double p = std::atan(xc / g) / g;
  const double q = std::atan(xc / xi) / xi;
  return pref * (p - q) / (xi * xi - g * g);
}

// integral over [X, inf) of the x^-3 closure Im[eps](x) = A x^-3 against the
// transform weight; reduces to A/X^3 * g(xi/X) with the same arctan-deficit
// kernel as the segments (g(0) = 1/3 recovers the xi = 0 limit).
double tail_integral(double X, double A, double xi) {
  if (A == 0.0) return 0.0;
  return A / (X * X * X) * atan_deficit(xi / X);
}

}  // namespace

OpticalDataTable OpticalDataTable::from_rows(std::vector<Row> r) {
  if (r.size() < 2) {
    throw invalid_input_error("optical data table needs at least 2 rows");
  }
  double prev = 0.0;
  for (const Row& row : r) {
    if (!std::isfinite(row.energy_ev) || row.energy_ev <= 0.0) {
      throw invalid_input_error("optical table energies must be finite and positive");
    }
    if (row.energy_ev <= prev) {
      throw invalid_input_error("optical table energies must be strictly increasing");
    }
    if (!(row.im_eps >= 0.0)) {
      throw invalid_input_error("optical table Im[eps] must be non-negative");
    }
    prev = row.energy_ev;
  }
  OpticalDataTable t;
  t.rows = std::move(r);
  return t;
}

IonCorrection ion_correction_for_salt(double concentration_mol_m3,
                                      double mass_cation_u,
                                      double mass_anion_u) {
  using namespace constants;
  if (concentration_mol_m3 < 0.0 || mass_cation_u <= 0.0 || mass_anion_u <= 0.0) {
    throw invalid_input_error("ion correction needs c >= 0 and positive masses");
  }
  const double n = concentration_mol_m3 * avogadro;
  const double w2 =
      n * elementary_charge * elementary_charge / eps0 *
      (1.0 / (mass_cation_u * atomic_mass_unit) +
       1.0 / (mass_anion_u * atomic_mass_unit));
  return IonCorrection{std::sqrt(w2)};
}

double eps_drude(double xi_rad_s, const DrudeParams& p) {
  if (!(p.plasma_freq_ev > 0.0) || !(p.relaxation_ev > 0.0)) {
    throw invalid_input_error("Drude parameters must be positive");
  }
  if (xi_rad_s <= 0.0) {
    throw divergence_error("Drude permittivity diverges at xi = 0");
  }
  const double wp = ev_to_rad_s(p.plasma_freq_ev);
  const double g = ev_to_rad_s(p.relaxation_ev);
  return 1.0 + wp * wp / (xi_rad_s * (xi_rad_s + g));
}

double eps_oscillator(double xi_rad_s, const OscillatorModel& m) {
  const double rir = xi_rad_s / m.omega_ir_rad_s;
  const double ruv = xi_rad_s / m.omega_uv_rad_s;
  return 1.0 + m.c_ir / (1.0 + rir * rir) + m.c_uv / (1.0 + ruv * ruv);
}

double eps_kramers_kronig(const OpticalDataTable& table, const DrudeParams& tail,
                          double crossover_ev, double xi_rad_s) {
  if (table.rows.empty()) {
    throw invalid_input_error("empty optical table");
  }
  const double xi = xi_rad_s;
  const double xc = ev_to_rad_s(crossover_ev);
  const double wp = ev_to_rad_s(tail.plasma_freq_ev);
  const double g = ev_to_rad_s(tail.relaxation_ev);

  double acc = drude_region_integral(xc, wp, g, xi);

  // bridge segment between the crossover and the first tabulated energy,
  // linear in x between the Drude value and the first table value
  const double x0 = ev_to_rad_s(table.rows.front().energy_ev);
  if (xc < x0) {
    const double v_left =
        xc > 0.0 ? wp * wp * g / (xc * (xc * xc + g * g)) : 0.0;
    const double v_right = table.rows.front().im_eps;
    const double beta = (v_right - v_left) / (x0 - xc);
    const double alpha = v_left - beta * xc;
    acc += segment_integral(xc, x0, alpha, beta, xi);
  }

  // tabulated region, clipped to x >= xc
  for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
    const double xa = ev_to_rad_s(table.rows[i].energy_ev);
    const double xb = ev_to_rad_s(table.rows[i + 1].energy_ev);
    const double lo = std::max(xa, xc);
    if (lo >= xb) continue;
    const double beta = (table.rows[i + 1].im_eps - table.rows[i].im_eps) / (xb - xa);
    const double alpha = table.rows[i].im_eps - beta * xa;
    acc += segment_integral(lo, xb, alpha, beta, xi);
  }

  // x^-3 closure beyond the last tabulated point
  const double xmax = ev_to_rad_s(table.rows.back().energy_ev);
  acc += tail_integral(xmax, table.rows.back().im_eps * xmax * xmax * xmax, xi);

  return 1.0 + (2.0 / M_PI) * acc;
}

double eps_with_ions(double xi_rad_s, const DielectricModel& base,
                     const IonCorrection& ions) {
  if (xi_rad_s <= 0.0) {
    throw divergence_error("ionic plasma term diverges at xi = 0");
  }
  const double w = ions.plasma_freq_rad_s;
  return base.eval(xi_rad_s) + w * w / (xi_rad_s * xi_rad_s);
}

// ---------------------------------------------------------------------------

struct DielectricModel::Impl {
  struct Constant {
    double eps;
  };
  struct Drude {
    DrudeParams p;
  };
  struct Tabulated {
    OpticalDataTable table;
    DrudeParams tail;
    double crossover_ev;
    // transform memo: force sums revisit the same Matsubara frequencies many
    // times, and the segment sweep dominates the evaluation cost
    mutable std::mutex cache_mutex;
    mutable std::unordered_map<double, double> cache;

    Tabulated(OpticalDataTable t, DrudeParams p, double c)
        : table(std::move(t)), tail(p), crossover_ev(c) {}
    Tabulated(const Tabulated& other)
        : table(other.table), tail(other.tail), crossover_ev(other.crossover_ev) {}
  };
  struct Oscillator {
    OscillatorModel m;
  };
  struct WithIons {
    DielectricModel base;
    IonCorrection ions;
  };
  std::variant<Constant, Drude, Tabulated, Oscillator, WithIons> v;
};

DielectricModel DielectricModel::constant(double eps_rel) {
  if (!(eps_rel >= 1.0)) {
    throw invalid_input_error("constant permittivity must be >= 1");
  }
  auto impl = std::make_shared<Impl>();
  impl->v = Impl::Constant{eps_rel};
  return DielectricModel(std::move(impl));
}

DielectricModel DielectricModel::drude(DrudeParams p) {
  if (!(p.plasma_freq_ev > 0.0) || !(p.relaxation_ev > 0.0)) {
    throw invalid_input_error("Drude parameters must be positive");
  }
  auto impl = std::make_shared<Impl>();
  impl->v = Impl::Drude{p};
  return DielectricModel(std::move(impl));
}

DielectricModel DielectricModel::tabulated_with_drude_tail(
    OpticalDataTable table, DrudeParams tail, double crossover_ev) {
  if (crossover_ev < 0.0 || crossover_ev > table.max_energy_ev()) {
    throw invalid_input_error(
        "crossover energy must lie within the table range or below its minimum");
  }
  if (crossover_ev > 0.0 &&
      (!(tail.plasma_freq_ev > 0.0) || !(tail.relaxation_ev > 0.0))) {
    throw invalid_input_error("Drude tail parameters must be positive");
  }
  auto impl = std::make_shared<Impl>();
  impl->v.emplace<Impl::Tabulated>(std::move(table), tail, crossover_ev);
  return DielectricModel(std::move(impl));
}

DielectricModel DielectricModel::oscillator(OscillatorModel m) {
  if (!(m.c_ir > 0.0) || !(m.c_uv > 0.0) || !(m.omega_ir_rad_s > 0.0) ||
      !(m.omega_uv_rad_s > 0.0)) {
    throw invalid_input_error("oscillator model parameters must be positive");
  }
  auto impl = std::make_shared<Impl>();
  impl->v = Impl::Oscillator{m};
  return DielectricModel(std::move(impl));
}

DielectricModel DielectricModel::with_ions(DielectricModel base,
                                           IonCorrection ions) {
  if (ions.plasma_freq_rad_s < 0.0) {
    throw invalid_input_error("ion plasma frequency must be >= 0");
  }
  auto impl = std::make_shared<Impl>();
  impl->v = Impl::WithIons{std::move(base), ions};
  return DielectricModel(std::move(impl));
}

double DielectricModel::eval(double xi_rad_s) const {
  if (xi_rad_s < 0.0) {
    throw invalid_input_error("imaginary frequency must be >= 0");
  }
  return std::visit(
      [xi_rad_s](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Impl::Constant>) {
          return m.eps;
        } else if constexpr (std::is_same_v<T, Impl::Drude>) {
          return eps_drude(xi_rad_s, m.p);
        } else if constexpr (std::is_same_v<T, Impl::Tabulated>) {
          {
            std::lock_guard<std::mutex> lock(m.cache_mutex);
            const auto it = m.cache.find(xi_rad_s);
            if (it != m.cache.end()) return it->second;
          }
          const double value =
              eps_kramers_kronig(m.table, m.tail, m.crossover_ev, xi_rad_s);
          std::lock_guard<std::mutex> lock(m.cache_mutex);
          m.cache.emplace(xi_rad_s, value);
          return value;
        } else if constexpr (std::is_same_v<T, Impl::Oscillator>) {
          return eps_oscillator(xi_rad_s, m.m);
        } else {
          return eps_with_ions(xi_rad_s, m.base, m.ions);
        }
      },
      impl_->v);
}

std::optional<double> DielectricModel::static_value() const {
  return std::visit(
      [](const auto& m) -> std::optional<double> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Impl::Constant>) {
          return m.eps;
        } else if constexpr (std::is_same_v<T, Impl::Drude>) {
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, Impl::Tabulated>) {
          if (m.crossover_ev == 0.0) {
            return eps_kramers_kronig(m.table, m.tail, 0.0, 0.0);
          }
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, Impl::Oscillator>) {
          return eps_oscillator(0.0, m.m);
        } else {
          return m.base.static_value();
        }
      },
      impl_->v);
}

std::string DielectricModel::describe() const {
  std::ostringstream out;
  std::visit(
      [&out](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Impl::Constant>) {
          out << "constant(eps=" << m.eps << ")";
        } else if constexpr (std::is_same_v<T, Impl::Drude>) {
          out << "drude(wp=" << m.p.plasma_freq_ev
              << "eV, gamma=" << m.p.relaxation_ev << "eV)";
        } else if constexpr (std::is_same_v<T, Impl::Tabulated>) {
          out << "tabulated(" << m.table.rows.size() << " rows, "
              << m.table.min_energy_ev() << "-" << m.table.max_energy_ev()
              << "eV, drude tail wp=" << m.tail.plasma_freq_ev
              << "eV below " << m.crossover_ev << "eV)";
        } else if constexpr (std::is_same_v<T, Impl::Oscillator>) {
          out << "oscillator(c_ir=" << m.m.c_ir << ", c_uv=" << m.m.c_uv << ")";
        } else {
          out << m.base.describe()
              << " + ions(wp=" << m.ions.plasma_freq_rad_s << " rad/s)";
        }
      },
      impl_->v);
  return out.str();
}

// ---------------------------------------------------------------------------

double matsubara_spacing(double temperature_k) {
  using namespace constants;
  if (!(temperature_k > 0.0)) {
    throw invalid_input_error("temperature must be positive");
  }
  return 2.0 * M_PI * k_boltzmann * temperature_k / hbar;
}

MatsubaraGrid matsubara_grid(double temperature_k, int m_max) {
  if (m_max < 1) {
    throw invalid_input_error("matsubara grid needs m_max >= 1");
  }
  const double xi1 = matsubara_spacing(temperature_k);
  MatsubaraGrid grid;
  grid.temperature_k = temperature_k;
  grid.xi_rad_s.resize(static_cast<std::size_t>(m_max) + 1);
  for (int m = 0; m <= m_max; ++m) {
    grid.xi_rad_s[static_cast<std::size_t>(m)] = m * xi1;
  }
  return grid;
}

}  // namespace caslif
