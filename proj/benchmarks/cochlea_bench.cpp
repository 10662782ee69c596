// SPDX-License-Identifier: Apache-2.0
//
// Timing of the main kernels: cylinder functions, boundary assembly,
// resonance search, modal solves and sweeps on the default array.
#include "experiment.hpp"

#include "cochlea/analysis.hpp"
#include "cochlea/boundary_integral.hpp"
#include "cochlea/hopf.hpp"
#include "cochlea/special_functions.hpp"
#include "cochlea/spectral.hpp"

#include <benchmark/benchmark.h>

namespace
{

using namespace cochlea;

const modal::ModalSystem &desk()
{
  static const modal::ModalSystem system = [] {
    cli::RunOptions options;
    options.cache_dir = COCHLEA_BENCH_CACHE_DIR;
    return cli::load_or_build_system(cli::ExperimentConfig{}, options);
  }();
  return system;
}

geometry::ResonatorArray desk_array(int n)
{
  return geometry::build_graded_array(n, 1.0, 1.05, 0.5, -5.0);
}

void BM_Hankel1Orders(benchmark::State &state)
{
  const complex z(0.7, -0.02);
  for (auto _ : state)
    benchmark::DoNotOptimize(special::hankel1_orders(static_cast<int>(state.range(0)), z));
}
BENCHMARK(BM_Hankel1Orders)->Arg(5)->Arg(20);

void BM_BesselJOrders(benchmark::State &state)
{
  const complex z(0.7, -0.02);
  for (auto _ : state)
    benchmark::DoNotOptimize(special::bessel_j_orders(static_cast<int>(state.range(0)), z));
}
BENCHMARK(BM_BesselJOrders)->Arg(5)->Arg(20);

void BM_AssembleBoundarySystem(benchmark::State &state)
{
  const auto array = desk_array(static_cast<int>(state.range(0)));
  const auto params = bie::WaveParams::make(1.0, 1.0, 1e-3);
  for (auto _ : state)
    benchmark::DoNotOptimize(bie::assemble_boundary_system(array, params, complex(0.03, -0.001), 5));
}
BENCHMARK(BM_AssembleBoundarySystem)->Arg(1)->Arg(6)->Unit(benchmark::kMicrosecond);

void BM_FindResonances(benchmark::State &state)
{
  const auto array = desk_array(static_cast<int>(state.range(0)));
  const auto params = bie::WaveParams::make(1.0, 1.0, 1e-3);
  for (auto _ : state)
    benchmark::DoNotOptimize(spectral::find_resonances(array, params, 5));
}
BENCHMARK(BM_FindResonances)->Arg(1)->Arg(6)->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_CubicCoefficients(benchmark::State &state)
{
  const complex a(0.3, 0.1), b(-0.2, 0.5), c(0.05, -0.02), d(0.01, 0.03);
  for (auto _ : state)
    benchmark::DoNotOptimize(hopf::cubic_coefficients(a, b, c, d));
}
BENCHMARK(BM_CubicCoefficients);

void BM_SolvePureTone(benchmark::State &state)
{
  const auto &sys = desk();
  const double W = analysis::resonance_real(sys, 2);
  const double F = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(hopf::solve_pure_tone(sys, W, F, 1.0));
}
BENCHMARK(BM_SolvePureTone)->Arg(6)->Arg(2)->Unit(benchmark::kMicrosecond);

void BM_SolveTwoTone(benchmark::State &state)
{
  const auto &sys = desk();
  const double W1 = analysis::resonance_modulus(sys, 4);
  for (auto _ : state)
    benchmark::DoNotOptimize(hopf::solve_two_tone(sys, W1, 1.03 * W1, 1e-5, 1e-5, 1.0));
}
BENCHMARK(BM_SolveTwoTone)->Unit(benchmark::kMicrosecond);

void BM_PhaseResponse(benchmark::State &state)
{
  const auto &sys = desk();
  const double w6 = analysis::resonance_real(sys, 6);
  const auto grid = analysis::linear_grid(0.05 * w6, 1.3 * w6, 1500);
  const auto points = analysis::default_observation_points(sys.array);
  analysis::PhaseOptions options;
  options.sweep.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(analysis::phase_response(sys, grid, 1e-6, 1.0, points, options));
}
BENCHMARK(BM_PhaseResponse)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
