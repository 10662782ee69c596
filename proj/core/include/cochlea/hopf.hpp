// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cochlea/modal.hpp"
#include "cochlea/types.hpp"

#include <array>
#include <optional>

/// Harmonic-balance solvers for the projected Hopf system and the
/// single-oscillator normal-form oracle.
///
/// Pure tone: for every mode m
///   (w_m^2 - W^2) X_m + F g_m - i W^3 beta sum_n Ginv_{nm} K_n(X, X, X) = 0,
/// with g_m = sum_n Ginv_{nm} s_n, s the source coupling, Ginv the inverse
/// Gram matrix and K_n(A, B, C) = sum_{ijk} A_i B_j conj(C_k) T[n][i][j][k].
namespace cochlea::hopf
{

struct NewtonOptions
{
  /// Certificate tolerance: residual <= tolerance * (1 + |F|).
  double tolerance = 1e-10;
  int max_iterations = 60;
  /// Maximum number of doublings in amplitude continuation.
  int max_continuation_steps = 80;
  /// Relative amplitude beyond which the iteration is declared divergent.
  double divergence_ratio = 1e8;
  /// Probe perturbed starts for other solution branches.
  bool check_branches = false;
};

struct PureToneSolution
{
  double Omega = 0.0;
  double F = 0.0;
  double beta = 0.0;
  CVector X;
  /// X - X_passive, computed directly (free of cancellation).
  CVector deviation;
  int newton_iters = 0;
  int continuation_steps = 0;
  double residual_norm = 0.0;
  bool converged = false;
  /// Set when a perturbed start converged to a different solution.
  bool multiple_branches = false;
};

/// g_m = sum_n Ginv_{nm} s_n.
CVector forcing_vector(const modal::ModalSystem &system);

/// Exact linear response X_m = -F g_m / (w_m^2 - W^2). Throws RangeError
/// when |w_m^2 - W^2| < 1e-14 |w_m^2|.
CVector solve_passive(const modal::ModalSystem &system, double Omega, double F);

/// Residual of the pure-tone equations at X (independent direct evaluation).
CVector pure_tone_residual(const modal::ModalSystem &system, double Omega, double F, double beta,
                           const CVector &X);

/// Damped Newton on the 2N real unknowns, with amplitude continuation in F
/// if the direct iteration stalls. Throws ConvergenceError on failure.
PureToneSolution solve_pure_tone(const modal::ModalSystem &system, double Omega, double F,
                                 double beta, const std::optional<CVector> &start = std::nullopt,
                                 const NewtonOptions &options = {});

/// Derivative of pure_tone_residual at X with respect to the stacked real
/// unknowns (Re X, Im X), rows stacked the same way (the Newton matrix).
RMatrix pure_tone_jacobian(const modal::ModalSystem &system, double Omega, double F, double beta,
                           const CVector &X);

// ---------------------------------------------------------------------------
// Two-tone harmonic balance.

struct CubicCoefficients
{
  complex c10;
  complex c01;
  complex c21;
  complex c12;
};

/// Coefficients of e^{i W1 t}, e^{i W2 t}, e^{i(2W1-W2)t}, e^{i(-W1+2W2)t} in
/// |a|^2 a for a = S10 e^{i W1 t} + S01 e^{i W2 t} + S21 e^{i(2W1-W2)t}
/// + S12 e^{i(-W1+2W2)t}.
CubicCoefficients cubic_coefficients(complex S10, complex S01, complex S21, complex S12);

/// Output frequencies in the order (1,0), (0,1), (2,-1), (-1,2).
std::array<double, 4> two_tone_frequencies(double Omega1, double Omega2);

struct TwoToneOptions
{
  NewtonOptions newton;
  /// Smallest admissible separation between any two output frequencies,
  /// relative to max(|W1|, |W2|).
  double min_separation = 1e-6;
};

struct TwoToneSolution
{
  double Omega1 = 0.0;
  double Omega2 = 0.0;
  double F1 = 0.0;
  double F2 = 0.0;
  double beta = 0.0;
  CVector X10;
  CVector X01;
  CVector X21;
  CVector X12;
  int newton_iters = 0;
  int continuation_steps = 0;
  double residual_norm = 0.0;
  bool converged = false;
};

/// Residuals of the four systems with the spatial coefficients (C_pq, u_n)_D
/// obtained from cubic_coefficients applied at the interior quadrature nodes.
std::array<CVector, 4> two_tone_residual(const modal::ModalSystem &system, double Omega1,
                                         double Omega2, double F1, double F2, double beta,
                                         const std::array<CVector, 4> &X);

/// Same residuals with the spatial coefficients contracted through the
/// cubic tensor (the form used by the Newton Jacobian).
std::array<CVector, 4> two_tone_residual_tensor(const modal::ModalSystem &system, double Omega1,
                                                double Omega2, double F1, double F2, double beta,
                                                const std::array<CVector, 4> &X);

/// Spatial coefficients (C_pq, u_n)_D from quadrature-node evaluation.
std::array<CVector, 4> two_tone_coefficients_quadrature(const modal::ModalSystem &system,
                                                        double Omega1, double Omega2,
                                                        const std::array<CVector, 4> &X);

/// Spatial coefficients (C_pq, u_n)_D from tensor contraction.
std::array<CVector, 4> two_tone_coefficients_tensor(const modal::ModalSystem &system,
                                                    double Omega1, double Omega2,
                                                    const std::array<CVector, 4> &X);

/// Derivative of the stacked two-tone residual with respect to the stacked
/// real unknowns (Re of all four blocks, then Im of all four blocks).
RMatrix two_tone_jacobian(const modal::ModalSystem &system, double Omega1, double Omega2,
                          double beta, const std::array<CVector, 4> &X);

TwoToneSolution solve_two_tone(const modal::ModalSystem &system, double Omega1, double Omega2,
                               double F1, double F2, double beta,
                               const std::optional<std::array<CVector, 4>> &start = std::nullopt,
                               const TwoToneOptions &options = {});

// ---------------------------------------------------------------------------
// Single Hopf oscillator dz/dt = (mu + i w0) z - |z|^2 z + F e^{i W t}.

struct HopfOracleOptions
{
  double initial_horizon = 200.0;
  double max_horizon = 1e9;
  double drift_tolerance = 1e-6;
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  /// Initial amplitude used when F = 0 (the origin is a fixed point).
  double unforced_seed = 1e-3;
};

struct HopfOracleResult
{
  double mu = 0.0;
  double omega0 = 0.0;
  double Omega = 0.0;
  double F = 0.0;
  double steady_amplitude = 0.0;
  double horizon = 0.0;
  double drift = 0.0;
};

/// Integrates in the frame rotating with the forcing, w = z e^{-i W t}, which
/// turns the forced oscillator into an autonomous system with the same
/// modulus, until the amplitude drift over the last 10% of the horizon is
/// below the tolerance, or until the amplitude falls below 100 times the
/// absolute integration tolerance (a decayed trajectory). Throws
/// ConvergenceError when the horizon cap is hit.
HopfOracleResult single_hopf_steady_state(double mu, double omega0, double Omega, double F,
                                          const HopfOracleOptions &options = {});

}  // namespace cochlea::hopf
