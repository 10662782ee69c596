// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cochlea/types.hpp"

#include <vector>

/// Integer-order cylinder functions of complex argument.
///
/// J_n is computed by Miller's backward recurrence normalised with the
/// generating-function identity e^{±iz} = J_0 + 2 Σ (±i)^n J_n, which keeps
/// the normalisation free of cancellation off the real axis. H^{(1)}_0 and
/// H^{(1)}_1 come from one of three routes depending on z:
///   - Neumann series for Y_0, Y_1 built from the same backward sweep
///     (|z| < 17, Im z <= 4),
///   - Hankel's asymptotic expansion (|z| >= 17),
///   - the Steed/Temme continued fraction for K_0, K_1 at w = -iz (Im z > 4),
///     where J + iY would cancel catastrophically.
/// Higher Hankel orders use upward recurrence, which is stable for H^{(1)}.
namespace cochlea::special
{

/// Largest |z| accepted by the evaluators.
inline constexpr double max_argument = 1000.0;

struct CylinderFunctionResult
{
  complex value;
  double estimated_abs_error = 0.0;
};

complex bessel_j(int order, complex z);
complex hankel1(int order, complex z);

CylinderFunctionResult bessel_j_result(int order, complex z);
CylinderFunctionResult hankel1_result(int order, complex z);

/// J_0(z), ..., J_{max_order}(z) from a single backward sweep.
std::vector<complex> bessel_j_orders(int max_order, complex z);

/// H^{(1)}_0(z), ..., H^{(1)}_{max_order}(z). Throws RangeError for z = 0
/// or when the highest order overflows.
std::vector<complex> hankel1_orders(int max_order, complex z);

/// Values and derivatives of J_n(z) and H^{(1)}_n(z) for -M <= n <= M.
class CylinderTable
{
public:
  /// `with_hankel = false` skips the Hankel family (and allows z = 0).
  CylinderTable(int max_order, complex z, bool with_hankel = true);

  int max_order() const noexcept { return max_order_; }
  complex argument() const noexcept { return z_; }

  complex j(int n) const;
  complex h(int n) const;
  /// d/dz J_n(z)
  complex dj(int n) const;
  /// d/dz H^{(1)}_n(z)
  complex dh(int n) const;

private:
  int max_order_;
  complex z_;
  std::vector<complex> j_;  // orders 0..M+1
  std::vector<complex> h_;
};

}  // namespace cochlea::special
