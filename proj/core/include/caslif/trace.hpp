#pragma once

#include <string>
#include <vector>

namespace caslif {

// Raw approach trace: detector signal vs piezo displacement. Displacement is
// monotone (acquisition order, either direction) with at least 2 samples per
// nm; the piezo axis origin is arbitrary until contact alignment.
struct DeflectionTrace {
  std::vector<double> piezo_nm;
  std::vector<double> detector_v;
  double velocity_nm_s = 0.0;  // signed; negative on approach
  double sample_rate_hz = 0.0;
  std::string label;

  static DeflectionTrace from_samples(std::vector<double> piezo_nm,
                                      std::vector<double> detector_v,
                                      double velocity_nm_s,
                                      double sample_rate_hz,
                                      std::string label = {});
  std::size_t size() const { return piezo_nm.size(); }
};

// Trace with the piezo origin fixed at the unbent-cantilever contact point
// and the deflection sensitivity extracted from the contact-line slope.
struct AlignedTrace {
  DeflectionTrace trace;             // ascending piezo order, shifted axis
  double sensitivity_nm_per_v = 0.0; // S = 1/|contact slope|
  double shift_nm = 0.0;             // subtracted from the raw axis
  double contact_slope_v_per_nm = 0.0;
  double contact_span_nm = 0.0;
  double far_rms_v = 0.0;            // detrended far-field noise
  bool contact_zero_applied = false;
};

}  // namespace caslif
