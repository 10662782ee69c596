// SPDX-License-Identifier: Apache-2.0
#include "cochlea/analysis.hpp"

#include "cochlea/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cochlea::analysis
{

namespace
{

/// Contiguous chains [begin, end) of at most `length` indices.
std::vector<std::pair<std::size_t, std::size_t>> chains(std::size_t count, std::size_t length)
{
  length = std::max<std::size_t>(1, length);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t b = 0; b < count; b += length)
    out.emplace_back(b, std::min(count, b + length));
  return out;
}

void check_grid(const std::vector<double> &grid)
{
  if (grid.empty())
    throw InvalidInput("frequency grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k)
  {
    if (!std::isfinite(grid[k]) || grid[k] <= 0.0)
      throw InvalidInput("frequency grid must contain positive finite values");
    if (k > 0 && grid[k] <= grid[k - 1])
      throw InvalidInput("frequency grid must be strictly increasing");
  }
}

}  // namespace

std::size_t SweepResult::flagged_count() const
{
  return static_cast<std::size_t>(
    std::count_if(points.begin(), points.end(), [](const auto &p) { return !p.flag.empty(); }));
}

std::size_t TwoToneSweep::flagged_count() const
{
  return static_cast<std::size_t>(
    std::count_if(points.begin(), points.end(), [](const auto &p) { return !p.flag.empty(); }));
}

std::vector<double> linear_grid(double lo, double hi, std::size_t count)
{
  if (!(hi > lo) || count < 2)
    throw InvalidInput("linear_grid: need hi > lo and at least two points");
  std::vector<double> g(count);
  for (std::size_t k = 0; k < count; ++k)
    g[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  return g;
}

double resonance_real(const modal::ModalSystem &system, std::size_t n)
{
  if (n < 1 || n > system.size())
    throw InvalidInput("resonance index out of range");
  return system.omegas[static_cast<Eigen::Index>(n - 1)].real();
}

double resonance_modulus(const modal::ModalSystem &system, std::size_t n)
{
  if (n < 1 || n > system.size())
    throw InvalidInput("resonance index out of range");
  return std::abs(system.omegas[static_cast<Eigen::Index>(n - 1)]);
}

SweepResult pure_tone_sweep(const modal::ModalSystem &system, const std::vector<double> &grid,
                            double F, double beta, const SweepOptions &options)
{
  check_grid(grid);
  SweepResult result;
  result.grid = grid;
  result.F = F;
  result.beta = beta;
  result.points.resize(grid.size());

  const auto blocks = chains(grid.size(), options.chain_length);
  parallel_for(blocks.size(), options.threads, [&](std::size_t b) {
    std::optional<CVector> start;
    for (std::size_t k = blocks[b].first; k < blocks[b].second; ++k)
    {
      auto &point = result.points[k];
      point.Omega = grid[k];
      try
      {
        point.solution = hopf::solve_pure_tone(system, grid[k], F, beta,
                                               options.warm_start ? start : std::nullopt,
                                               options.newton);
        if (point.solution->multiple_branches)
          point.flag = "multiple_branches";
        start = point.solution->X;
      }
      catch (const std::exception &e)
      {
        point.solution.reset();
        point.flag = std::string("solve_failed: ") + e.what();
      }
    }
  });
  return result;
}

// ---------------------------------------------------------------------------
// Phase.

std::vector<double> unwrap_phase(const std::vector<double> &wrapped)
{
  std::vector<double> out(wrapped.size());
  if (wrapped.empty())
    return out;
  out[0] = wrapped[0];
  for (std::size_t k = 1; k < wrapped.size(); ++k)
  {
    double step = std::remainder(wrapped[k] - wrapped[k - 1], 2.0 * pi);  // [-pi, pi]
    if (step <= -pi)
      step += 2.0 * pi;
    out[k] = out[k - 1] + step;
  }
  return out;
}

std::vector<double> group_delay(const std::vector<double> &grid, const std::vector<double> &phi)
{
  if (grid.size() != phi.size())
    throw InvalidInput("group_delay: grid and phase sizes differ");
  const std::size_t n = grid.size();
  std::vector<double> out(n, 0.0);
  if (n < 2)
    return out;
  for (std::size_t k = 0; k < n; ++k)
  {
    double slope;
    if (k == 0)
      slope = (phi[1] - phi[0]) / (grid[1] - grid[0]);
    else if (k + 1 == n)
      slope = (phi[n - 1] - phi[n - 2]) / (grid[n - 1] - grid[n - 2]);
    else
      slope = (phi[k + 1] - phi[k - 1]) / (grid[k + 1] - grid[k - 1]);
    out[k] = slope * grid[k] / (2.0 * pi);
  }
  return out;
}

std::vector<double> group_delay(const PhaseCurve &curve)
{
  return group_delay(curve.grid, curve.phi);
}

std::vector<Vec2> default_observation_points(const geometry::ResonatorArray &array)
{
  std::vector<Vec2> out;
  for (const auto &r : array.resonators)
    out.emplace_back(r.center.x(), 0.0);
  return out;
}

PhaseResponse phase_response(const modal::ModalSystem &system, const std::vector<double> &grid,
                             double F, double beta, const std::vector<Vec2> &x_points,
                             const PhaseOptions &options)
{
  for (const auto &x : x_points)
    if (geometry::distance_to_boundary(system.array, x) < 1e-9)
      throw InvalidInput("phase_response: observation point on a resonator boundary");

  PhaseResponse out;
  out.sweep = pure_tone_sweep(system, grid, F, beta, options.sweep);

  const auto N = static_cast<Eigen::Index>(system.size());
  std::vector<std::vector<double>> wrapped(x_points.size());
  for (std::size_t c = 0; c < x_points.size(); ++c)
  {
    PhaseCurve curve;
    curve.x = x_points[c];
    curve.grid = grid;
    CVector u(N);
    for (Eigen::Index n = 0; n < N; ++n)
      u[n] = system.modes[static_cast<std::size_t>(n)].field.value(x_points[c]);
    for (std::size_t k = 0; k < grid.size(); ++k)
    {
      const auto &point = out.sweep.points[k];
      complex p = 0.0;
      if (point.solution)
        p = u.transpose() * point.solution->X;
      else
        curve.flagged.push_back(k);
      curve.R.push_back(std::abs(p));
      wrapped[c].push_back(std::arg(p));
    }
    out.curves.push_back(std::move(curve));
  }

  double low = 0.0;
  for (std::size_t c = 0; c < out.curves.size(); ++c)
  {
    out.curves[c].phi = unwrap_phase(wrapped[c]);
    low += out.curves[c].phi.front() / (2.0 * pi);
  }
  if (!out.curves.empty())
    out.raw_low_frequency_delay = low / static_cast<double>(out.curves.size());
  out.sign_flipped = options.normalize_sign && out.raw_low_frequency_delay > 0.0;

  for (auto &curve : out.curves)
  {
    if (out.sign_flipped)
      for (auto &v : curve.phi)
        v = -v;
    for (std::size_t k = 0; k < curve.phi.size(); ++k)
    {
      curve.phase_delay_cycles.push_back(curve.phi[k] / (2.0 * pi));
      if (k > 0 && std::abs(curve.phi[k] - curve.phi[k - 1]) > options.unwrap_threshold)
        curve.flagged.push_back(k);
    }
    std::sort(curve.flagged.begin(), curve.flagged.end());
    curve.flagged.erase(std::unique(curve.flagged.begin(), curve.flagged.end()),
                        curve.flagged.end());
    curve.group_delay_cycles = group_delay(curve);
  }
  return out;
}

double plateau_mean(const PhaseCurve &curve, double fraction)
{
  if (curve.phase_delay_cycles.empty() || !(fraction > 0.0) || fraction > 1.0)
    throw InvalidInput("plateau_mean: empty curve or invalid fraction");
  const std::size_t n = curve.phase_delay_cycles.size();
  const std::size_t count =
    std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n))));
  const double sum = std::accumulate(curve.phase_delay_cycles.end() - static_cast<long>(count),
                                     curve.phase_delay_cycles.end(), 0.0);
  return sum / static_cast<double>(count);
}

// ---------------------------------------------------------------------------
// Two-tone.

std::vector<double> two_tone_grid(double Omega1, double lo, double hi, std::size_t count,
                                  double floor)
{
  std::vector<double> out;
  for (double w : linear_grid(lo, hi, count))
    if (std::abs(w - Omega1) >= floor * Omega1)
      out.push_back(w);
  return out;
}

TwoToneSweep two_tone_sweep(const modal::ModalSystem &system, double Omega1,
                            const std::vector<double> &grid2, double F1, double F2, double beta,
                            std::size_t mode_index, const TwoToneSweepOptions &options)
{
  check_grid(grid2);
  if (mode_index >= system.size())
    throw InvalidInput("two_tone_sweep: mode index out of range");
  const double floor = options.solver.min_separation * std::abs(Omega1);
  for (double w : grid2)
    if (std::abs(w - Omega1) < floor)
      throw InvalidInput("two_tone_sweep: grid point inside the collision floor around Omega1");

  TwoToneSweep result;
  result.Omega1 = Omega1;
  result.grid = grid2;
  result.F1 = F1;
  result.F2 = F2;
  result.beta = beta;
  result.mode_index = mode_index;
  result.points.resize(grid2.size());
  const auto m = static_cast<Eigen::Index>(mode_index);

  const auto blocks = chains(grid2.size(), options.sweep.chain_length);
  parallel_for(blocks.size(), options.sweep.threads, [&](std::size_t b) {
    std::optional<std::array<CVector, 4>> start;
    for (std::size_t k = blocks[b].first; k < blocks[b].second; ++k)
    {
      auto &point = result.points[k];
      point.Omega2 = grid2[k];
      try
      {
        point.X01_passive = hopf::solve_passive(system, grid2[k], F2)[m];
        point.solution = hopf::solve_two_tone(system, Omega1, grid2[k], F1, F2, beta,
                                              options.sweep.warm_start ? start : std::nullopt,
                                              options.solver);
        const auto &s = *point.solution;
        point.X10 = s.X10[m];
        point.X01 = s.X01[m];
        point.X21 = s.X21[m];
        point.X12 = s.X12[m];
        start = std::array<CVector, 4>{s.X10, s.X01, s.X21, s.X12};
      }
      catch (const std::exception &e)
      {
        point.solution.reset();
        point.flag = std::string("solve_failed: ") + e.what();
      }
    }
  });
  return result;
}

// ---------------------------------------------------------------------------

BoxSensitivity box_sensitivity(const modal::ModalSystem &system, double inflation,
                               const std::vector<double> &grid, double F, double beta,
                               unsigned threads)
{
  modal::ModalSystem other = system;
  const auto quad = modal::QuadratureSpec::for_array(system.array, inflation);
  other.quad.lo = quad.lo;
  other.quad.hi = quad.hi;
  other.quad.inflation = inflation;
  other.gram = modal::gram_matrix(system.modes, system.array, system.params, other.quad, threads);
  other.gram_inverse = modal::invert_gram(other.gram);

  BoxSensitivity out;
  out.inflation = inflation;
  for (double w : grid)
  {
    const CVector a = hopf::solve_pure_tone(system, w, F, beta).X;
    const CVector b = hopf::solve_pure_tone(other, w, F, beta).X;
    out.max_relative_change = std::max(out.max_relative_change, (b - a).norm() / a.norm());
  }
  return out;
}

}  // namespace cochlea::analysis
