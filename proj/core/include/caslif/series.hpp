#pragma once

#include <cstddef>
#include <vector>

namespace caslif {

// Scattered (x, value) samples; x in nm, value unit set by context (V or pN).
struct TracePoints {
  std::vector<double> x_nm;
  std::vector<double> value;
  double velocity_nm_s = 0.0;
};

// Values on a uniform grid whose points are integer multiples of step_nm, so
// independently resampled signals share grid phase and can be combined.
struct SampledSignal {
  double x0_nm = 0.0;
  double step_nm = 0.5;
  std::vector<double> values;
  double velocity_nm_s = 0.0;

  std::size_t size() const { return values.size(); }
  double x_at(std::size_t i) const { return x0_nm + static_cast<double>(i) * step_nm; }
  double x_last() const { return values.empty() ? x0_nm : x_at(values.size() - 1); }
};

// Linear interpolation of scattered points onto the uniform grid covering
// their span. Points are sorted by x first; exact duplicates are averaged.
SampledSignal resample_uniform(const TracePoints& points, double step_nm = 0.5);

// Restrict to grid points with x in [lo, hi] (inclusive).
SampledSignal slice_signal(const SampledSignal& s, double lo_nm, double hi_nm);

}  // namespace caslif
