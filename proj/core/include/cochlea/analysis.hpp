// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cochlea/hopf.hpp"
#include "cochlea/modal.hpp"
#include "cochlea/types.hpp"

#include <optional>
#include <string>
#include <vector>

/// Frequency sweeps, phase and group delay, and two-tone sweeps over a
/// projected modal system.
namespace cochlea::analysis
{

struct SweepOptions
{
  /// Worker count (0 = hardware concurrency). Results do not depend on it.
  unsigned threads = 0;
  /// Warm starts run along contiguous chains of this many grid points; the
  /// chain layout is fixed so that any worker count gives identical output.
  std::size_t chain_length = 16;
  bool warm_start = true;
  hopf::NewtonOptions newton;
};

struct PureTonePoint
{
  double Omega = 0.0;
  std::optional<hopf::PureToneSolution> solution;
  /// Empty when the point solved cleanly.
  std::string flag;
};

struct SweepResult
{
  std::vector<double> grid;
  double F = 0.0;
  double beta = 0.0;
  std::vector<PureTonePoint> points;

  std::size_t flagged_count() const;
};

/// Strictly increasing grid of `count` points on [lo, hi].
std::vector<double> linear_grid(double lo, double hi, std::size_t count);

/// Re w_n and |w_n| (1-based n), the two readings of "the n-th resonance".
double resonance_real(const modal::ModalSystem &system, std::size_t n);
double resonance_modulus(const modal::ModalSystem &system, std::size_t n);

/// solve_pure_tone at every grid point, warm-started from the previous point
/// of the same chain. Failures are flagged per point and never abort.
SweepResult pure_tone_sweep(const modal::ModalSystem &system, const std::vector<double> &grid,
                            double F, double beta, const SweepOptions &options = {});

// ---------------------------------------------------------------------------
// Phase.

struct PhaseCurve
{
  Vec2 x = Vec2::Zero();
  std::vector<double> grid;
  std::vector<double> R;
  /// Unwrapped phase in radians (after the global sign convention).
  std::vector<double> phi;
  std::vector<double> phase_delay_cycles;
  std::vector<double> group_delay_cycles;
  /// Grid indices where the unwrapped increment exceeded the confidence
  /// threshold or the solve failed; refine the grid around them.
  std::vector<std::size_t> flagged;
};

struct PhaseOptions
{
  SweepOptions sweep;
  /// Flip the global phase sign when the low-frequency phase delay comes
  /// out positive (the surfaced convention flag).
  bool normalize_sign = true;
  /// Unwrapped increments above this magnitude (radians) are flagged.
  double unwrap_threshold = 0.5 * pi;
};

struct PhaseResponse
{
  SweepResult sweep;
  std::vector<PhaseCurve> curves;
  /// Mean low-frequency phase delay before any sign normalisation.
  double raw_low_frequency_delay = 0.0;
  bool sign_flipped = false;
};

/// Adds multiples of 2 pi so that consecutive increments lie in (-pi, pi].
std::vector<double> unwrap_phase(const std::vector<double> &wrapped);

/// (d phi / d Omega) * Omega / (2 pi): central differences inside,
/// one-sided at the ends.
std::vector<double> group_delay(const std::vector<double> &grid, const std::vector<double> &phi);
std::vector<double> group_delay(const PhaseCurve &curve);

/// Resonator centres on the membrane line.
std::vector<Vec2> default_observation_points(const geometry::ResonatorArray &array);

/// Pressure amplitude p(x) = sum_n X_n u_n(x) along a sweep, its modulus and
/// unwrapped phase, phase delay and group delay at each observation point.
/// Throws InvalidInput for points on a resonator boundary.
PhaseResponse phase_response(const modal::ModalSystem &system, const std::vector<double> &grid,
                             double F, double beta, const std::vector<Vec2> &x_points,
                             const PhaseOptions &options = {});

/// Mean phase delay (cycles) over the last `fraction` of the grid.
double plateau_mean(const PhaseCurve &curve, double fraction = 0.1);

// ---------------------------------------------------------------------------
// Two-tone.

struct TwoTonePoint
{
  double Omega2 = 0.0;
  std::optional<hopf::TwoToneSolution> solution;
  /// Component `mode_index` of the amplitudes (zero when the point failed).
  complex X10;
  complex X01;
  complex X21;
  complex X12;
  complex X01_passive;
  std::string flag;
};

struct TwoToneSweep
{
  double Omega1 = 0.0;
  std::vector<double> grid;
  double F1 = 0.0;
  double F2 = 0.0;
  double beta = 0.0;
  std::size_t mode_index = 0;
  std::vector<TwoTonePoint> points;

  std::size_t flagged_count() const;
};

struct TwoToneSweepOptions
{
  SweepOptions sweep;
  hopf::TwoToneOptions solver;
};

/// Uniform grid on [lo, hi] with the points inside the collision floor
/// |Omega2 - Omega1| < floor * Omega1 removed.
std::vector<double> two_tone_grid(double Omega1, double lo, double hi, std::size_t count,
                                  double floor);

/// Two-tone solutions with Omega1 fixed and Omega2 swept (0-based
/// mode_index). Throws InvalidInput if a grid point violates the collision
/// floor.
TwoToneSweep two_tone_sweep(const modal::ModalSystem &system, double Omega1,
                            const std::vector<double> &grid2, double F1, double F2, double beta,
                            std::size_t mode_index, const TwoToneSweepOptions &options = {});

// ---------------------------------------------------------------------------
// Sensitivity of responses to the box Q.

struct BoxSensitivity
{
  double inflation = 0.0;
  /// max over the grid of ||X(Q') - X(Q)|| / ||X(Q)||.
  double max_relative_change = 0.0;
};

/// Rebuilds the Gram matrix on a box inflated by `inflation` and compares
/// pure-tone responses on `grid`.
BoxSensitivity box_sensitivity(const modal::ModalSystem &system, double inflation,
                               const std::vector<double> &grid, double F, double beta,
                               unsigned threads = 0);

}  // namespace cochlea::analysis
