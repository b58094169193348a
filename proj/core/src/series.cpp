#include "caslif/series.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "caslif/errors.hpp"

namespace caslif {

SampledSignal resample_uniform(const TracePoints& points, double step_nm) {
  if (points.x_nm.size() != points.value.size() || points.x_nm.size() < 2) {
    throw invalid_input_error("resampling needs >= 2 matching samples");
  }
  if (!(step_nm > 0.0)) throw invalid_input_error("grid step must be positive");

  std::vector<std::size_t> order(points.x_nm.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return points.x_nm[a] < points.x_nm[b];
  });

  // collapse duplicate abscissae by averaging
  std::vector<double> xs, vs;
  xs.reserve(order.size());
  vs.reserve(order.size());
  for (std::size_t idx : order) {
    const double x = points.x_nm[idx];
    const double v = points.value[idx];
    if (!xs.empty() && x - xs.back() < 1e-9) {
      // merge into the previous knot
      vs.back() = 0.5 * (vs.back() + v);
    } else {
      xs.push_back(x);
      vs.push_back(v);
    }
  }
  if (xs.size() < 2) throw invalid_input_error("degenerate abscissae in resampling");

  const double lo = std::ceil(xs.front() / step_nm - 1e-9) * step_nm;
  const double hi = std::floor(xs.back() / step_nm + 1e-9) * step_nm;
  if (hi < lo) throw analysis_error("resampling span shorter than one grid step");

  SampledSignal out;
  out.x0_nm = lo;
  out.step_nm = step_nm;
  out.velocity_nm_s = points.velocity_nm_s;
  const std::size_t n = static_cast<std::size_t>(std::llround((hi - lo) / step_nm)) + 1;
  out.values.resize(n);

  std::size_t seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = lo + static_cast<double>(i) * step_nm;
    while (seg + 2 < xs.size() && xs[seg + 1] < x) ++seg;
    const double xa = xs[seg], xb = xs[seg + 1];
    const double t = std::clamp((x - xa) / (xb - xa), 0.0, 1.0);
    out.values[i] = vs[seg] + t * (vs[seg + 1] - vs[seg]);
  }
  return out;
}

SampledSignal slice_signal(const SampledSignal& s, double lo_nm, double hi_nm) {
  const double eps = 1e-9;
  std::size_t first = 0;
  while (first < s.size() && s.x_at(first) < lo_nm - eps) ++first;
  std::size_t last = s.size();
  while (last > first && s.x_at(last - 1) > hi_nm + eps) --last;
  if (last <= first) throw analysis_error("signal slice is empty");
  SampledSignal out;
  out.x0_nm = s.x_at(first);
  out.step_nm = s.step_nm;
  out.velocity_nm_s = s.velocity_nm_s;
  out.values.assign(s.values.begin() + static_cast<std::ptrdiff_t>(first),
                    s.values.begin() + static_cast<std::ptrdiff_t>(last));
  return out;
}

}  // namespace caslif
