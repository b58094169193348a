#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "caslif/dielectrics.hpp"
#include "caslif/io.hpp"
#include "caslif/lifshitz.hpp"
#include "caslif/pipeline.hpp"
#include "caslif/synth.hpp"

namespace {

using namespace caslif;

std::filesystem::path data_dir() {
  const char* env = std::getenv("CASLIF_DATA");
  return env ? std::filesystem::path(env) : std::filesystem::path("data");
}

DielectricModel gold() {
  static const DielectricModel m = DielectricModel::tabulated_with_drude_tail(
      read_optical_table(data_dir() / "optical" / "gold_im_eps.dat"),
      {7.50, 0.061}, 0.125);
  return m;
}

DielectricModel ethanol() {
  return DielectricModel::oscillator({23.84, 0.852, 6.60e14, 1.14e16});
}

LayerSystem gold_ethanol_gold() {
  return {gold(), gold(), ethanol(), 294.15, 19.9e-6};
}

void BM_eps_gold_kk(benchmark::State& state) {
  const auto m = gold();
  const double xi = matsubara_spacing(294.15) * static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.eval(xi));
  }
}
BENCHMARK(BM_eps_gold_kk)->Arg(1)->Arg(100);

void BM_force_sphere_plate(benchmark::State& state) {
  const auto sys = gold_ethanol_gold();
  const double d = static_cast<double>(state.range(0)) * 1e-9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(force_sphere_plate(sys, d));
  }
}
BENCHMARK(BM_force_sphere_plate)->Arg(20)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_synth_trace(benchmark::State& state) {
  SynthParams p;
  p.noise_sigma_pn = 110.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(synth_trace(p));
  }
}
BENCHMARK(BM_synth_trace)->Unit(benchmark::kMillisecond);

void BM_align_contact_zero(benchmark::State& state) {
  SynthParams p;
  p.noise_sigma_pn = 110.0;
  const DeflectionTrace t = synth_trace(p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(align_contact_zero(t));
  }
}
BENCHMARK(BM_align_contact_zero)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
