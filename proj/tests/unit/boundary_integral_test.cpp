// SPDX-License-Identifier: Apache-2.0
#include "cochlea/boundary_integral.hpp"
#include "cochlea/special_functions.hpp"
#include "cochlea/spectral.hpp"

#include <Eigen/SVD>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace
{

using namespace cochlea;
using bie::MultipoleDensity;

bie::WaveParams desk_params(double delta = 1e-3) { return bie::WaveParams::make(1.0, 1.0, delta); }

geometry::ResonatorArray desk_array(int n = 6)
{
  return geometry::build_graded_array(n, 1.0, 1.05, 0.5, -5.0);
}

MultipoleDensity random_density(std::size_t n, int M, unsigned seed)
{
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  auto d = MultipoleDensity::zero(n, M);
  for (std::size_t j = 0; j < n; ++j)
    for (int m = 0; m < 2 * M + 1; ++m)
    {
      d.psi[j][m] = complex(g(rng), g(rng));
      d.phi[j][m] = complex(g(rng), g(rng));
    }
  return d;
}

// Five-point Laplacian plus k^2 u, relative to |k^2 u| + |Laplacian| scale.
template <class Field>
double helmholtz_defect(const Field &u, const Vec2 &x, complex k, double h)
{
  const complex c = u(x);
  const complex lap = (u(x + Vec2(h, 0)) + u(x - Vec2(h, 0)) + u(x + Vec2(0, h)) +
                       u(x - Vec2(0, h)) - 4.0 * c) /
                      (h * h);
  return std::abs(lap + k * k * c) / (std::abs(lap) + std::abs(k * k * c));
}

TEST(FundamentalSolution, RadiallySymmetric)
{
  const complex k(0.7, -0.01);
  EXPECT_EQ(bie::fundamental_solution(k, Vec2(1.3, 0.0)),
            bie::fundamental_solution(k, Vec2(0.0, 1.3)));
  EXPECT_NEAR(std::abs(bie::fundamental_solution(k, Vec2(0.6, 0.8)) -
                       bie::fundamental_solution(k, Vec2(1.0, 0.0))),
              0.0, 1e-15);
}

TEST(FundamentalSolution, SolvesHelmholtzAwayFromOrigin)
{
  const complex k = 0.5;
  const auto G = [&](const Vec2 &x) { return bie::fundamental_solution(k, x); };
  const Vec2 x(2.0 / std::sqrt(2.0), 2.0 / std::sqrt(2.0));
  const double h = 1e-3;
  const complex c = G(x);
  const complex lap =
    (G(x + Vec2(h, 0)) + G(x - Vec2(h, 0)) + G(x + Vec2(0, h)) + G(x - Vec2(0, h)) - 4.0 * c) /
    (h * h);
  EXPECT_LE(std::abs(lap + k * k * c), 1e-6 * std::abs(c));
}

TEST(FundamentalSolution, OutgoingModulusDecay)
{
  // |-(i/4) H0(k r)| -> (1/4) sqrt(2 / (pi k r)).
  const double k = 1.0;
  const double r = 50.0;
  const double want = 0.25 * std::sqrt(2.0 / (pi * k * r));
  EXPECT_NEAR(std::abs(bie::fundamental_solution(k, Vec2(r, 0.0))) / want, 1.0, 0.01);
}

TEST(FundamentalSolution, RejectsOrigin)
{
  EXPECT_THROW(bie::fundamental_solution(1.0, Vec2(0.0, 0.0)), InvalidInput);
  EXPECT_THROW(bie::fundamental_solution(0.0, Vec2(1.0, 0.0)), InvalidInput);
}

TEST(BoundarySystem, SingleCircleDoesNotMixOrders)
{
  const auto a = desk_array(1);
  const int M = 6;
  const auto sys = bie::assemble_boundary_system(a, desk_params(), complex(0.02, -0.004), M);
  ASSERT_EQ(sys.matrix.rows(), 2 * (2 * M + 1));
  for (int b1 = 0; b1 < 2; ++b1)
    for (int b2 = 0; b2 < 2; ++b2)
      for (int n = -M; n <= M; ++n)
        for (int m = -M; m <= M; ++m)
          if (n != m)
            EXPECT_EQ(sys.matrix(sys.index(b1, 0, n), sys.index(b2, 0, m)), complex(0.0));
}

TEST(BoundarySystem, CommutesWithMirrorOperator)
{
  const auto a = geometry::build_graded_array(2, 1.0, 1.0, 0.5, -5.0);
  const int M = 5;
  const auto sys = bie::assemble_boundary_system(a, desk_params(), complex(0.03, -0.001), M);
  const CMatrix P = spectral::mirror_operator(a, M).cast<complex>();
  EXPECT_LE((P * sys.matrix - sys.matrix * P).norm(), 1e-12 * sys.matrix.norm());
}

TEST(BoundarySystem, AssemblyIsBitReproducible)
{
  const auto a = desk_array();
  const auto s1 = bie::assemble_boundary_system(a, desk_params(), complex(0.03, -0.001), 5);
  const auto s2 = bie::assemble_boundary_system(a, desk_params(), complex(0.03, -0.001), 5);
  EXPECT_TRUE(s1.matrix == s2.matrix);
}

TEST(BoundarySystem, SmallestSingularValueConvergesInTruncation)
{
  const auto a = desk_array();
  const complex omega(0.03, -0.001);
  const double s5 = spectral::sigma_min(a, desk_params(), omega, 5);
  const double s7 = spectral::sigma_min(a, desk_params(), omega, 7);
  const double s9 = spectral::sigma_min(a, desk_params(), omega, 9);
  const double d57 = std::abs(s5 - s7) / s7;
  const double d79 = std::abs(s7 - s9) / s9;
  EXPECT_LT(d79, 1e-4) << s7 << " vs " << s9;
  EXPECT_LT(d57, 3e-4) << s5 << " vs " << s7;
  EXPECT_LT(d79, 0.2 * d57);
}

TEST(BoundarySystem, RejectsInvalidInput)
{
  EXPECT_THROW(bie::assemble_boundary_system(desk_array(2), desk_params(), 0.0, 5), InvalidInput);
  EXPECT_THROW(bie::assemble_boundary_system(desk_array(2), desk_params(), 0.1, 0), InvalidInput);
  auto bad = desk_array(2);
  bad.resonators[1].center.x() = bad.resonators[0].center.x() + 1.0;
  EXPECT_THROW(bie::assemble_boundary_system(bad, desk_params(), 0.1, 5), InvalidInput);
}

TEST(FieldEvaluation, ZeroDensityGivesZeroField)
{
  const auto a = desk_array(3);
  const auto d = MultipoleDensity::zero(3, 5);
  for (const Vec2 &x : {Vec2(-2.0, 1.0), a.resonators[1].center, Vec2(4.0, 3.0)})
    EXPECT_EQ(bie::evaluate_field(a, desk_params(), complex(0.03, -0.001), d, x), complex(0.0));
}

TEST(FieldEvaluation, MatchesDirectLayerPotentialQuadrature)
{
  // Independent oracle: trapezoid rule on the single-layer integral with the
  // density reconstructed from its Fourier coefficients.
  const auto a = desk_array(2);
  const auto params = desk_params();
  const complex omega(0.4, -0.02);
  const int M = 4;
  const auto d = random_density(2, M, 7);
  const complex k = params.k_exterior(omega);
  const Vec2 x(3.1, 2.4);
  complex want = 0.0;
  const int P = 512;
  for (std::size_t j = 0; j < 2; ++j)
  {
    const auto &r = a.resonators[j];
    for (int q = 0; q < P; ++q)
    {
      const double t = 2.0 * pi * q / P;
      complex psi = 0.0;
      for (int m = -M; m <= M; ++m)
        psi += d.psi[j][m + M] * std::exp(I * static_cast<double>(m) * t);
      const Vec2 y = r.center + r.radius * Vec2(std::cos(t), std::sin(t));
      want += bie::fundamental_solution(k, x - y) * psi * (2.0 * pi * r.radius / P);
    }
  }
  const complex got = bie::evaluate_field(a, params, omega, d, x);
  EXPECT_LT(std::abs(got - want), 1e-10 * std::abs(want));
}

TEST(FieldEvaluation, FarFieldIsMonopole)
{
  const auto a = desk_array(3);
  const auto params = desk_params();
  const complex omega(0.03, -0.001);
  auto d = MultipoleDensity::zero(3, 5);
  d.psi[0][5] = 1.0;  // order 0 on resonator 1
  const auto &c1 = a.resonators[0];
  const Vec2 x = c1.center + Vec2(60.0, 80.0) * c1.radius;  // distance 100 r1
  const complex moment = 2.0 * pi * c1.radius;
  const complex want = moment * bie::fundamental_solution(params.k_exterior(omega), x - c1.center);
  EXPECT_LT(std::abs(bie::evaluate_field(a, params, omega, d, x) - want), 0.01 * std::abs(want));
}

TEST(FieldEvaluation, SolvesHelmholtzInsideAndOutside)
{
  const auto a = desk_array(3);
  const auto params = bie::WaveParams::make(1.0, 0.7, 1e-3);
  const complex omega(0.3, -0.01);
  const auto d = random_density(3, 4, 11);
  const bie::FieldEvaluator u(a, params, omega, d);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ux(-3.0, 14.0);
  std::uniform_real_distribution<double> uy(-3.0, 3.0);
  int inside = 0;
  int outside = 0;
  while (inside < 5 || outside < 5)
  {
    const Vec2 x(ux(rng), uy(rng));
    if (geometry::distance_to_boundary(a, x) < 0.2)
      continue;
    const bool in = geometry::containing_resonator(a, x) >= 0;
    if ((in && inside >= 5) || (!in && outside >= 5))
      continue;
    const complex k = in ? params.k_interior(omega) : params.k_exterior(omega);
    const auto f = [&](const Vec2 &y) { return u.value(y); };
    EXPECT_LT(helmholtz_defect(f, x, k, 1e-3), 1e-5) << x.transpose() << (in ? " in" : " out");
    (in ? inside : outside)++;
  }
}

TEST(FieldEvaluation, ContinuousAcrossBoundaryAtResonance)
{
  const auto a = desk_array(2);
  const auto params = desk_params();
  const auto res = spectral::find_resonances(a, params, 5);
  const auto mode = spectral::extract_eigenmode(a, params, res.back());
  double max_u = 0.0;
  double max_jump = 0.0;
  for (const auto &r : a.resonators)
    for (int q = 0; q < 64; ++q)
    {
      const double t = 2.0 * pi * q / 64;
      const Vec2 x = r.center + r.radius * Vec2(std::cos(t), std::sin(t));
      const complex out = mode.field.value(x, bie::Side::exterior);
      const complex in = mode.field.value(x, bie::Side::interior);
      max_u = std::max(max_u, std::abs(out));
      max_jump = std::max(max_jump, std::abs(out - in));
    }
  EXPECT_LE(max_jump, 1e-8 * max_u);
}

TEST(FieldEvaluation, RejectsPointsOnBoundaryWithoutSide)
{
  const auto a = desk_array(1);
  const auto d = random_density(1, 3, 1);
  const Vec2 x = a.resonators[0].center + Vec2(a.resonators[0].radius, 0.0);
  EXPECT_THROW(bie::evaluate_field(a, desk_params(), 0.02, d, x), InvalidInput);
  EXPECT_NO_THROW(bie::evaluate_field(a, desk_params(), 0.02, d, x, bie::Side::exterior));
}

TEST(WaveParams, Invariants)
{
  const auto p = bie::WaveParams::make(2.0, 3.0, 1e-3);
  EXPECT_EQ(p.tau, 1.5);
  EXPECT_NO_THROW(p.validate());
  auto bad = p;
  bad.tau = 1.4;
  EXPECT_THROW(bad.validate(), InvalidInput);
  EXPECT_THROW(bie::WaveParams::make(1.0, 1.0, 0.0), InvalidInput);
  EXPECT_THROW(bie::WaveParams::make(-1.0, 1.0, 1e-3), InvalidInput);
}

}  // namespace
