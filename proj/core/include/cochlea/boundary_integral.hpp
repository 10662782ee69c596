// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cochlea/geometry.hpp"
#include "cochlea/types.hpp"

#include <vector>

/// Multipole discretisation of the two-dimensional Helmholtz transmission
/// problem on a union of disjoint disks.
///
/// The field is represented by single-layer potentials
///   u = S^{k}[psi]   outside the disks,  k   = omega / v,
///   u = S^{k_b}[phi] inside the disks,   k_b = omega / v_b,
/// with kernel Gamma^k(x) = -(i/4) H^{(1)}_0(k|x|). On circle j each density
/// is a Fourier series sum_n c_n e^{i n theta_j}, |n| <= M. The single layer
/// of e^{i n theta} on a circle of radius R is
///   -(i pi R / 2) J_n(kR) H^{(1)}_n(kr) e^{i n theta}   (r > R),
///   -(i pi R / 2) H^{(1)}_n(kR) J_n(kr) e^{i n theta}   (r < R),
/// and fields radiated by circle j are re-expanded about centre i with Graf's
/// addition theorem. The unknown vector stacks psi (all circles) then phi
/// (all circles), each circle contributing orders -M..M.
namespace cochlea::bie
{

struct WaveParams
{
  double v = 1.0;
  double v_b = 1.0;
  double delta = 1e-3;
  double tau = 1.0;

  /// Builds parameters with tau = v_b / v.
  static WaveParams make(double v, double v_b, double delta);

  /// Throws InvalidInput if an invariant is violated.
  void validate() const;

  complex k_exterior(complex omega) const { return omega / v; }
  complex k_interior(complex omega) const { return omega / v_b; }
};

struct MultipoleDensity
{
  int M = 0;
  std::vector<CVector> psi;  // per resonator, orders -M..M
  std::vector<CVector> phi;

  /// Zero density for n resonators.
  static MultipoleDensity zero(std::size_t n, int M);
  /// Splits a stacked (psi, phi) vector.
  static MultipoleDensity from_stacked(const CVector &x, std::size_t n, int M);
  CVector stacked() const;
  std::size_t resonator_count() const { return psi.size(); }
};

struct BoundarySystem
{
  complex omega;
  std::size_t resonators = 0;
  int M = 0;
  CMatrix matrix;

  int orders() const { return 2 * M + 1; }
  /// Row/column index of (block, resonator, order n); block 0 is the
  /// exterior density / continuity rows, block 1 the interior density /
  /// flux rows.
  Eigen::Index index(int block, std::size_t resonator, int n) const
  {
    return static_cast<Eigen::Index>(
      (static_cast<std::size_t>(block) * resonators + resonator) * orders() + (n + M));
  }
};

/// -(i/4) H^{(1)}_0(k|x|). Throws InvalidInput for x = 0 or k = 0.
complex fundamental_solution(complex k, const Vec2 &x);

/// Rows 0..N(2M+1)-1 enforce u_+ - u_- = 0 per Fourier order on each
/// circle; the remaining rows enforce delta d_nu u_+ - d_nu u_- = 0.
BoundarySystem assemble_boundary_system(const geometry::ResonatorArray &array,
                                        const WaveParams &params, complex omega, int M);

enum class Side
{
  automatic,  ///< decide from position; rejects points on a boundary
  exterior,   ///< exterior representation (outer trace on a boundary)
  interior,   ///< interior representation of the containing/nearest disk
};

/// Precomputed multipole coefficients for fast repeated field evaluation.
class FieldEvaluator
{
public:
  FieldEvaluator(const geometry::ResonatorArray &array, const WaveParams &params, complex omega,
                 const MultipoleDensity &density);

  complex value(const Vec2 &x, Side side = Side::automatic) const;

  struct ValueGradient
  {
    complex value;
    complex dx;
    complex dy;
  };
  ValueGradient value_and_gradient(const Vec2 &x, Side side = Side::automatic) const;

  /// Multiplies every coefficient by c (fields scale linearly).
  void scale(complex c);

  complex omega() const { return omega_; }
  const geometry::ResonatorArray &array() const { return array_; }

private:
  // Resolves the side; returns the disk index for interior evaluation.
  int resolve(const Vec2 &x, Side side) const;
  ValueGradient evaluate(const Vec2 &x, int disk, bool gradient) const;

  geometry::ResonatorArray array_;
  complex omega_;
  complex k_;
  complex kb_;
  int M_;
  // coefficient of H_n(k r_j) e^{i n theta_j} in the exterior field
  std::vector<CVector> ext_;
  // coefficient of J_n(k_b r_i) e^{i n theta_i} (own disk, interior field)
  std::vector<CVector> own_;
  // coefficient of H_n(k_b r_j) e^{i n theta_j} (other disks, interior field)
  std::vector<CVector> other_;
};

/// Field of the layer-potential representation at x (see FieldEvaluator).
complex evaluate_field(const geometry::ResonatorArray &array, const WaveParams &params,
                       complex omega, const MultipoleDensity &density, const Vec2 &x,
                       Side side = Side::automatic);

/// Tolerance within which a point counts as lying on a boundary.
inline constexpr double boundary_tolerance = 1e-12;

}  // namespace cochlea::bie
