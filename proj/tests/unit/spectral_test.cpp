// SPDX-License-Identifier: Apache-2.0
#include "cochlea/spectral.hpp"

#include <Eigen/LU>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

namespace
{

using namespace cochlea;

bie::WaveParams params_for(double delta) { return bie::WaveParams::make(1.0, 1.0, delta); }

geometry::ResonatorArray graded(int n) { return geometry::build_graded_array(n, 1.0, 1.05, 0.5, -5.0); }

geometry::ResonatorArray identical_pair() { return geometry::build_graded_array(2, 1.0, 1.0, 0.5, -5.0); }

// Polar midpoint rule for int_D |u|^2, independent of the Gauss rule used
// for normalisation.
double l2_norm_squared(const geometry::ResonatorArray &array, const bie::FieldEvaluator &u)
{
  const int nr = 60;
  const int nt = 120;
  double sum = 0.0;
  for (const auto &r : array.resonators)
    for (int a = 0; a < nr; ++a)
    {
      const double rho = (a + 0.5) * r.radius / nr;
      for (int b = 0; b < nt; ++b)
      {
        const double t = 2.0 * pi * (b + 0.5) / nt;
        const Vec2 x = r.center + rho * Vec2(std::cos(t), std::sin(t));
        sum += std::norm(u.value(x)) * rho * (r.radius / nr) * (2.0 * pi / nt);
      }
    }
  return sum;
}

TEST(Resonances, SingleResonatorIsASharpMinimum)
{
  const auto a = graded(1);
  const auto res = spectral::find_resonances(a, params_for(1e-3), 5);
  ASSERT_EQ(res.size(), 1u);
  const double at = spectral::sigma_min(a, params_for(1e-3), res[0].omega, 5);
  const double off = spectral::sigma_min(a, params_for(1e-3), res[0].omega * 1.1, 5);
  EXPECT_LE(at, 1e-4 * off);
  EXPECT_LT(res[0].omega.imag(), 0.0);
}

TEST(Resonances, DefaultArrayIsOrderedAndCertified)
{
  const auto res = spectral::find_resonances(graded(6), params_for(1e-3), 5);
  ASSERT_EQ(res.size(), 6u);
  for (std::size_t n = 0; n < res.size(); ++n)
  {
    EXPECT_LE(res[n].residual, 1e-8);
    EXPECT_GE(res[n].refinement_drift, 0.0);
    EXPECT_LT(res[n].refinement_drift, 1e-4);
    EXPECT_LT(res[n].omega.imag(), 0.0);
    if (n > 0)
      EXPECT_LT(res[n - 1].omega.real(), res[n].omega.real());
  }
}

TEST(Resonances, CountAndScalingAcrossContrast)
{
  const auto a = graded(6);
  std::vector<std::vector<spectral::Resonance>> by_delta;
  for (double delta : {1e-2, 1e-3, 1e-4})
  {
    by_delta.push_back(spectral::find_resonances(a, params_for(delta), 5));
    ASSERT_EQ(by_delta.back().size(), 6u) << "delta " << delta;
  }
  for (std::size_t d = 1; d < by_delta.size(); ++d)
    for (std::size_t n = 0; n < 6; ++n)
      EXPECT_LT(std::abs(by_delta[d][n].omega), std::abs(by_delta[d - 1][n].omega));
}

TEST(Resonances, IdenticalPairSplitsIntoParitySectors)
{
  const auto pair = identical_pair();
  const auto params = params_for(1e-3);
  const auto single = spectral::find_resonances(graded(1), params, 5);
  const auto res = spectral::find_resonances(pair, params, 5);
  ASSERT_EQ(res.size(), 2u);
  const auto even = spectral::find_parity_resonances(pair, params, 5, +1, 1);
  const auto odd = spectral::find_parity_resonances(pair, params, 5, -1, 1);
  ASSERT_EQ(even.size(), 1u);
  ASSERT_EQ(odd.size(), 1u);

  std::vector<complex> oracle = {even[0].omega, odd[0].omega};
  std::sort(oracle.begin(), oracle.end(), [](complex x, complex y) { return x.real() < y.real(); });
  for (std::size_t n = 0; n < 2; ++n)
    EXPECT_LT(std::abs(res[n].omega - oracle[n]), 1e-8 * std::abs(oracle[n]));
  // Hybridisation moves both away from the isolated value.
  for (const auto &r : res)
    EXPECT_GT(std::abs(r.omega - single[0].omega), 1e-6 * std::abs(single[0].omega));
}

TEST(Resonances, MisconfiguredWindowIsReported)
{
  spectral::SearchOptions search;
  search.omega_max = 0.02;  // excludes most of the default array's resonances
  EXPECT_THROW(spectral::find_resonances(graded(6), params_for(1e-3), 5, search), ConvergenceError);
}

TEST(Eigenmodes, PairModesAreMirrorSymmetric)
{
  const auto pair = identical_pair();
  const auto params = params_for(1e-3);
  const double axis = *spectral::mirror_axis(pair);
  const auto res = spectral::find_resonances(pair, params, 5);
  const auto modes = spectral::extract_eigenmodes(pair, params, res);
  const Vec2 probes[] = {{0.4, 0.3}, {1.7, -0.5}, {-1.0, 2.0}, {2.3, 0.0}, {0.9, 1.5}};
  std::vector<int> parities;
  for (const auto &mode : modes)
  {
    const double scale = std::abs(mode.field.value(pair.resonators[0].center));
    const complex ratio = mode.field.value(probes[0]) /
                          mode.field.value(Vec2(2.0 * axis - probes[0].x(), probes[0].y()));
    const int parity = ratio.real() > 0 ? 1 : -1;
    parities.push_back(parity);
    for (const Vec2 &x : probes)
    {
      const Vec2 image(2.0 * axis - x.x(), x.y());
      EXPECT_LT(std::abs(mode.field.value(x) - double(parity) * mode.field.value(image)),
                1e-6 * scale);
    }
  }
  EXPECT_NE(parities[0], parities[1]);

  // Agreement with the parity-restricted oracle modes.
  for (std::size_t n = 0; n < 2; ++n)
  {
    const auto oracle_res = spectral::find_parity_resonances(pair, params, 5, parities[n], 1);
    const auto oracle = spectral::extract_parity_eigenmode(pair, params, oracle_res[0], parities[n]);
    for (const Vec2 &x : probes)
      EXPECT_LT(std::abs(modes[n].field.value(x) - oracle.field.value(x)),
                1e-6 * std::abs(oracle.field.value(pair.resonators[0].center)));
  }
}

TEST(Eigenmodes, SingleDiskInteriorIsNearlyConstant)
{
  const auto a = graded(1);
  const auto params = params_for(1e-4);
  const auto res = spectral::find_resonances(a, params, 5);
  const auto mode = spectral::extract_eigenmode(a, params, res[0]);
  const auto &disk = a.resonators[0];
  complex mean = 0.0;
  std::vector<complex> ring;
  for (int q = 0; q < 64; ++q)
  {
    const double t = 2.0 * pi * q / 64;
    ring.push_back(mode.field.value(disk.center + 0.9 * disk.radius * Vec2(std::cos(t), std::sin(t))));
    mean += ring.back() / 64.0;
  }
  for (const complex &v : ring)
    EXPECT_LT(std::abs(v - mean), 0.05 * std::abs(mean));
}

TEST(Eigenmodes, UnitNormAndPhaseConvention)
{
  const auto a = graded(3);
  const auto params = params_for(1e-3);
  const auto modes = spectral::extract_eigenmodes(a, params, spectral::find_resonances(a, params, 5));
  const auto &largest = a.resonators.back();
  for (const auto &mode : modes)
  {
    EXPECT_NEAR(l2_norm_squared(a, mode.field), 1.0, 1e-3);
    // Interior mean over the largest disk: real and positive.
    complex mean = 0.0;
    for (int q = 0; q < 32; ++q)
      for (int r = 1; r <= 8; ++r)
      {
        const double t = 2.0 * pi * q / 32;
        const double rho = largest.radius * (r - 0.5) / 8;
        mean += mode.field.value(largest.center + rho * Vec2(std::cos(t), std::sin(t))) * rho;
      }
    EXPECT_GT(mean.real(), 0.0);
    EXPECT_LT(std::abs(mean.imag()), 1e-3 * std::abs(mean));
  }
}

TEST(Eigenmodes, SatisfyTransmissionConditionsOnTheBoundary)
{
  const auto a = graded(2);
  const auto params = params_for(1e-3);
  spectral::SearchOptions search;
  search.check_refinement = false;
  const int M = 20;
  const auto res = spectral::find_resonances(a, params, M, search);
  for (const auto &r : res)
  {
    const auto mode = spectral::extract_eigenmode(a, params, r);
    double max_u = 0.0;
    double max_flux = 0.0;
    double jump_u = 0.0;
    double jump_flux = 0.0;
    for (const auto &disk : a.resonators)
      for (int q = 0; q < 64; ++q)
      {
        const double t = 2.0 * pi * q / 64;
        const Vec2 nu(std::cos(t), std::sin(t));
        const Vec2 x = disk.center + disk.radius * nu;
        const auto out = mode.field.value_and_gradient(x, bie::Side::exterior);
        const auto in = mode.field.value_and_gradient(x, bie::Side::interior);
        const complex dn_out = out.dx * nu.x() + out.dy * nu.y();
        const complex dn_in = in.dx * nu.x() + in.dy * nu.y();
        max_u = std::max(max_u, std::abs(out.value));
        max_flux = std::max(max_flux, std::abs(dn_out));
        jump_u = std::max(jump_u, std::abs(out.value - in.value));
        jump_flux = std::max(jump_flux, std::abs(params.delta * dn_out - dn_in));
      }
    EXPECT_LE(jump_u, 1e-6 * max_u);
    EXPECT_LE(jump_flux, 1e-6 * max_flux) << "flux scale " << max_flux;
  }
}

TEST(RootFinding, MullerFindsPolynomialRoot)
{
  const auto f = [](complex z) { return (z - complex(0.3, -0.2)) * (z + 2.0); };
  const auto r = spectral::muller(f, 0.0, 0.5, complex(0.4, 0.1));
  ASSERT_TRUE(r.converged);
  EXPECT_LT(std::abs(r.root - complex(0.3, -0.2)), 1e-13);
}

TEST(RootFinding, LogDeterminantMatchesProductOfEigenvalues)
{
  CMatrix A(3, 3);
  A << complex(2, 1), 0.5, 0.0, complex(0, 1), complex(-1, 0.3), 0.2, 0.1, 0.0, complex(0.5, -2);
  const complex det = A.determinant();
  const complex ld = spectral::log_determinant(A);
  EXPECT_LT(std::abs(std::exp(ld) - det), 1e-13 * std::abs(det));
}

TEST(Symmetry, MirrorOperatorIsAnInvolution)
{
  const auto pair = identical_pair();
  ASSERT_TRUE(spectral::mirror_axis(pair).has_value());
  EXPECT_FALSE(spectral::mirror_axis(graded(2)).has_value());
  const RMatrix P = spectral::mirror_operator(pair, 4);
  EXPECT_LT((P * P - RMatrix::Identity(P.rows(), P.cols())).norm(), 1e-15);
  const RMatrix Qe = spectral::parity_basis(pair, 4, +1);
  const RMatrix Qo = spectral::parity_basis(pair, 4, -1);
  EXPECT_EQ(Qe.cols() + Qo.cols(), P.rows());
  EXPECT_LT((P * Qe - Qe).norm(), 1e-14);
  EXPECT_LT((P * Qo + Qo).norm(), 1e-14);
}

}  // namespace
