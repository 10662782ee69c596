// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cochlea/boundary_integral.hpp"
#include "cochlea/geometry.hpp"
#include "cochlea/types.hpp"

#include <functional>
#include <optional>
#include <vector>

/// Subwavelength resonances of the coupled array and their eigenmodes.
namespace cochlea::spectral
{

struct Resonance
{
  complex omega;
  /// Smallest singular value of the boundary system at omega.
  double residual = 0.0;
  int M = 0;
  /// |omega(M+2) - omega(M)| / |omega(M)|; negative when not checked.
  double refinement_drift = -1.0;
};

struct SearchOptions
{
  /// Upper end of the real window; <= 0 selects subwavelength_cutoff().
  double omega_max = 0.0;
  /// Number of real-part samples (geometrically spaced) per scan line.
  int grid_points = 240;
  /// Smallest real part scanned, as a fraction of omega_max.
  double omega_min_fraction = 1e-3;
  /// Residual (sigma_min) tolerance for accepted roots.
  double tolerance = 1e-8;
  /// Relative tolerance for M -> M+2 stability.
  double refinement_tolerance = 1e-4;
  bool check_refinement = true;
  unsigned threads = 0;
};

/// Largest omega for which the longest wavelength is at least ten times
/// the largest resonator diameter: 2 pi min(v, v_b) / (20 R_max).
double subwavelength_cutoff(const geometry::ResonatorArray &array, const bie::WaveParams &params);

/// Smallest singular value of the boundary system.
double sigma_min(const geometry::ResonatorArray &array, const bie::WaveParams &params,
                 complex omega, int M);

/// Exactly array.size() resonances sorted by real part. Throws
/// ConvergenceError on wrong counts or unstable refinement.
std::vector<Resonance> find_resonances(const geometry::ResonatorArray &array,
                                       const bie::WaveParams &params, int M,
                                       const SearchOptions &search = {});

struct Eigenmode
{
  Resonance resonance;
  /// Unit right-singular vector for the smallest singular value.
  bie::MultipoleDensity density;
  /// Scale applied to `density` to obtain the normalised mode.
  complex normalization{1.0, 0.0};
  /// Evaluator of the normalised mode u_n.
  bie::FieldEvaluator field;
};

struct NormalizationRule
{
  int radial = 24;
  int angular = 48;
};

/// Nullspace mode at a resonance, normalised to unit L2 norm over D with
/// the interior mean over the largest resonator real and positive. Throws
/// ConvergenceError when the smallest singular value is degenerate.
Eigenmode extract_eigenmode(const geometry::ResonatorArray &array, const bie::WaveParams &params,
                            const Resonance &resonance, const NormalizationRule &rule = {});

/// Extracts and normalises every mode.
std::vector<Eigenmode> extract_eigenmodes(const geometry::ResonatorArray &array,
                                          const bie::WaveParams &params,
                                          const std::vector<Resonance> &resonances,
                                          const NormalizationRule &rule = {});

// ---------------------------------------------------------------------------
// Mirror symmetry (for arrays symmetric about a vertical line).

/// x1 coordinate of the mirror line, or nullopt when the array is not
/// mirror symmetric to `tol`.
std::optional<double> mirror_axis(const geometry::ResonatorArray &array, double tol = 1e-12);

/// Signed permutation P acting on stacked densities that represents the
/// reflection x1 -> 2a - x1. P^2 = I and P commutes with the boundary
/// matrix of a symmetric array.
RMatrix mirror_operator(const geometry::ResonatorArray &array, int M);

/// Orthonormal basis of the parity-p eigenspace of the mirror operator.
RMatrix parity_basis(const geometry::ResonatorArray &array, int M, int parity);

/// Resonances of the parity-restricted system Q^T A Q (expected count
/// `count`); modes found this way are exactly symmetric (+1) or
/// antisymmetric (-1).
std::vector<Resonance> find_parity_resonances(const geometry::ResonatorArray &array,
                                              const bie::WaveParams &params, int M, int parity,
                                              std::size_t count,
                                              const SearchOptions &search = {});

/// Mode of the parity-restricted system (same normalisation conventions).
Eigenmode extract_parity_eigenmode(const geometry::ResonatorArray &array,
                                   const bie::WaveParams &params, const Resonance &resonance,
                                   int parity, const NormalizationRule &rule = {});

// ---------------------------------------------------------------------------
// Root-finding building blocks.

using ScalarFunction = std::function<complex(complex)>;

struct MullerResult
{
  complex root;
  int iterations = 0;
  bool converged = false;
};

/// Muller's method from three starting points.
MullerResult muller(const ScalarFunction &f, complex x0, complex x1, complex x2,
                    double rel_tol = 1e-14, int max_iter = 100);

/// log det of a square matrix via partial-pivot LU (principal branch of
/// the logarithm of each pivot).
complex log_determinant(const CMatrix &A);

}  // namespace cochlea::spectral
