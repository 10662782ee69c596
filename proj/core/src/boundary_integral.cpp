// SPDX-License-Identifier: Apache-2.0
#include "cochlea/boundary_integral.hpp"

#include "cochlea/special_functions.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cochlea::bie
{

namespace
{

complex layer_prefactor(double radius)
{
  return -I * pi * radius / 2.0;
}

// e^{i n theta} for n = -M-1 .. M+1, indexed by n + M + 1.
std::vector<complex> angular_powers(int M, double theta)
{
  std::vector<complex> out(static_cast<std::size_t>(2 * M + 3));
  const complex unit = std::polar(1.0, theta);
  const complex inv = std::conj(unit);
  out[static_cast<std::size_t>(M + 1)] = 1.0;
  for (int n = 1; n <= M + 1; ++n)
  {
    out[static_cast<std::size_t>(M + 1 + n)] = out[static_cast<std::size_t>(M + n)] * unit;
    out[static_cast<std::size_t>(M + 1 - n)] = out[static_cast<std::size_t>(M + 2 - n)] * inv;
  }
  return out;
}

}  // namespace

WaveParams WaveParams::make(double v, double v_b, double delta)
{
  WaveParams p;
  p.v = v;
  p.v_b = v_b;
  p.delta = delta;
  p.tau = v_b / v;
  p.validate();
  return p;
}

void WaveParams::validate() const
{
  if (!(v > 0.0) || !std::isfinite(v))
    throw InvalidInput("v must be positive");
  if (!(v_b > 0.0) || !std::isfinite(v_b))
    throw InvalidInput("v_b must be positive");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw InvalidInput("delta must be positive");
  if (std::abs(tau - v_b / v) > 4.0 * std::numeric_limits<double>::epsilon() * (v_b / v))
    throw InvalidInput("tau must equal v_b / v");
}

MultipoleDensity MultipoleDensity::zero(std::size_t n, int M)
{
  MultipoleDensity d;
  d.M = M;
  d.psi.assign(n, CVector::Zero(2 * M + 1));
  d.phi.assign(n, CVector::Zero(2 * M + 1));
  return d;
}

MultipoleDensity MultipoleDensity::from_stacked(const CVector &x, std::size_t n, int M)
{
  const Eigen::Index K = 2 * M + 1;
  if (x.size() != static_cast<Eigen::Index>(2 * n) * K)
    throw InvalidInput("stacked density has the wrong length");
  MultipoleDensity d = zero(n, M);
  for (std::size_t j = 0; j < n; ++j)
  {
    d.psi[j] = x.segment(static_cast<Eigen::Index>(j) * K, K);
    d.phi[j] = x.segment(static_cast<Eigen::Index>(n + j) * K, K);
  }
  return d;
}

CVector MultipoleDensity::stacked() const
{
  const Eigen::Index K = 2 * M + 1;
  const std::size_t n = psi.size();
  CVector x(static_cast<Eigen::Index>(2 * n) * K);
  for (std::size_t j = 0; j < n; ++j)
  {
    x.segment(static_cast<Eigen::Index>(j) * K, K) = psi[j];
    x.segment(static_cast<Eigen::Index>(n + j) * K, K) = phi[j];
  }
  return x;
}

complex fundamental_solution(complex k, const Vec2 &x)
{
  const double r = x.norm();
  if (r == 0.0)
    throw InvalidInput("fundamental solution is singular at x = 0");
  if (k == 0.0)
    throw InvalidInput("fundamental solution requires k != 0");
  return -0.25 * I * special::hankel1(0, k * r);
}

BoundarySystem assemble_boundary_system(const geometry::ResonatorArray &array,
                                        const WaveParams &params, complex omega, int M)
{
  params.validate();
  if (omega == 0.0)
    throw InvalidInput("omega must be non-zero");
  if (M < 1)
    throw InvalidInput("truncation order M must be at least 1");
  const auto violations = geometry::validate_array(array);
  if (!violations.empty())
    throw InvalidInput("invalid array: " + violations.front());

  const std::size_t N = array.size();
  BoundarySystem sys;
  sys.omega = omega;
  sys.resonators = N;
  sys.M = M;
  const Eigen::Index dim = static_cast<Eigen::Index>(2 * N) * sys.orders();
  sys.matrix = CMatrix::Zero(dim, dim);

  struct Family
  {
    complex kappa;
    int column_block;
    double continuity_sign;
    double flux_weight;
    bool exterior;
  };
  const Family families[2] = {
    {params.k_exterior(omega), 0, 1.0, params.delta, true},
    {params.k_interior(omega), 1, -1.0, -1.0, false},
  };

  for (const auto &fam : families)
  {
    // Cylinder functions at kappa * R_j, shared by every target circle.
    std::vector<special::CylinderTable> on_circle;
    on_circle.reserve(N);
    for (std::size_t j = 0; j < N; ++j)
      on_circle.emplace_back(M, fam.kappa * array.resonators[j].radius);

    for (std::size_t i = 0; i < N; ++i)
    {
      const auto &ti = on_circle[i];
      for (std::size_t j = 0; j < N; ++j)
      {
        const complex pref = layer_prefactor(array.resonators[j].radius);
        const auto &tj = on_circle[j];
        if (i == j)
        {
          for (int n = -M; n <= M; ++n)
          {
            const Eigen::Index col = sys.index(fam.column_block, j, n);
            const complex trace = pref * tj.j(n) * tj.h(n);
            const complex flux = fam.exterior ? pref * fam.kappa * tj.j(n) * tj.dh(n)
                                              : pref * fam.kappa * tj.h(n) * tj.dj(n);
            sys.matrix(sys.index(0, i, n), col) += fam.continuity_sign * trace;
            sys.matrix(sys.index(1, i, n), col) += fam.flux_weight * flux;
          }
          continue;
        }

        const Vec2 d = array.resonators[i].center - array.resonators[j].center;
        const double dist = d.norm();
        if (!(dist > array.resonators[i].radius))
        {
          std::ostringstream msg;
          msg << "addition theorem invalid: circle " << i << " reaches centre of circle " << j;
          throw InvalidInput(msg.str());
        }
        const double alpha = std::atan2(d.y(), d.x());
        // H_{q}(kappa d) e^{i q alpha} for q = n - m in [-2M, 2M].
        const special::CylinderTable translation(2 * M, fam.kappa * dist);
        const auto phase = angular_powers(2 * M, alpha);
        for (int m = -M; m <= M; ++m)
        {
          const Eigen::Index row_c = sys.index(0, i, m);
          const Eigen::Index row_f = sys.index(1, i, m);
          const complex jm = ti.j(m);
          const complex djm = ti.dj(m);
          for (int n = -M; n <= M; ++n)
          {
            const int q = n - m;
            const complex g = pref * tj.j(n) * translation.h(q) *
                              phase[static_cast<std::size_t>(q + 2 * M + 1)];
            const Eigen::Index col = sys.index(fam.column_block, j, n);
            sys.matrix(row_c, col) += fam.continuity_sign * g * jm;
            sys.matrix(row_f, col) += fam.flux_weight * g * fam.kappa * djm;
          }
        }
      }
    }
  }
  return sys;
}

FieldEvaluator::FieldEvaluator(const geometry::ResonatorArray &array, const WaveParams &params,
                               complex omega, const MultipoleDensity &density)
  : array_(array),
    omega_(omega),
    k_(params.k_exterior(omega)),
    kb_(params.k_interior(omega)),
    M_(density.M)
{
  const std::size_t N = array.size();
  if (density.psi.size() != N || density.phi.size() != N)
    throw InvalidInput("density does not match the resonator count");
  ext_.resize(N);
  own_.resize(N);
  other_.resize(N);
  for (std::size_t j = 0; j < N; ++j)
  {
    const double R = array.resonators[j].radius;
    const complex pref = layer_prefactor(R);
    const special::CylinderTable te(M_, k_ * R);
    const special::CylinderTable ti(M_, kb_ * R);
    ext_[j].resize(2 * M_ + 1);
    own_[j].resize(2 * M_ + 1);
    other_[j].resize(2 * M_ + 1);
    for (int n = -M_; n <= M_; ++n)
    {
      const auto a = static_cast<Eigen::Index>(n + M_);
      ext_[j](a) = pref * te.j(n) * density.psi[j](a);
      own_[j](a) = pref * ti.h(n) * density.phi[j](a);
      other_[j](a) = pref * ti.j(n) * density.phi[j](a);
    }
  }
}

void FieldEvaluator::scale(complex c)
{
  for (auto *family : {&ext_, &own_, &other_})
    for (auto &v : *family)
      v *= c;
}

int FieldEvaluator::resolve(const Vec2 &x, Side side) const
{
  const int inside = geometry::containing_resonator(array_, x);
  switch (side)
  {
  case Side::exterior:
    return -1;
  case Side::interior:
    if (inside >= 0)
      return inside;
    {
      // nearest disk (point on or just outside a boundary)
      int best = 0;
      double best_gap = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < array_.size(); ++i)
      {
        const auto &r = array_.resonators[i];
        const double gap = std::abs((x - r.center).norm() - r.radius);
        if (gap < best_gap)
        {
          best_gap = gap;
          best = static_cast<int>(i);
        }
      }
      return best;
    }
  case Side::automatic:
    break;
  }
  if (geometry::distance_to_boundary(array_, x) <= boundary_tolerance)
    throw InvalidInput("evaluation point lies on a resonator boundary; choose a side");
  return inside;
}

FieldEvaluator::ValueGradient FieldEvaluator::evaluate(const Vec2 &x, int disk,
                                                      bool gradient) const
{
  ValueGradient out{0.0, 0.0, 0.0};
  complex plus = 0.0;   // (d/dx + i d/dy) u
  complex minus = 0.0;  // (d/dx - i d/dy) u

  auto accumulate = [&](const CVector &coef, const Vec2 &centre, complex kappa, bool hankel) {
    const Vec2 rel = x - centre;
    const double r = rel.norm();
    const double theta = std::atan2(rel.y(), rel.x());
    const special::CylinderTable table(M_ + 1, kappa * r, hankel);
    const auto e = angular_powers(M_, theta);
    auto Z = [&](int n) { return hankel ? table.h(n) : table.j(n); };
    for (int n = -M_; n <= M_; ++n)
    {
      const complex c = coef(static_cast<Eigen::Index>(n + M_));
      out.value += c * Z(n) * e[static_cast<std::size_t>(n + M_ + 1)];
      if (gradient)
      {
        plus -= c * kappa * Z(n + 1) * e[static_cast<std::size_t>(n + M_ + 2)];
        minus += c * kappa * Z(n - 1) * e[static_cast<std::size_t>(n + M_)];
      }
    }
  };

  if (disk < 0)
  {
    for (std::size_t j = 0; j < array_.size(); ++j)
      accumulate(ext_[j], array_.resonators[j].center, k_, true);
  }
  else
  {
    const auto i = static_cast<std::size_t>(disk);
    accumulate(own_[i], array_.resonators[i].center, kb_, false);
    for (std::size_t j = 0; j < array_.size(); ++j)
      if (j != i)
        accumulate(other_[j], array_.resonators[j].center, kb_, true);
  }
  if (gradient)
  {
    out.dx = 0.5 * (plus + minus);
    out.dy = (plus - minus) / (2.0 * I);
  }
  return out;
}

complex FieldEvaluator::value(const Vec2 &x, Side side) const
{
  return evaluate(x, resolve(x, side), false).value;
}

FieldEvaluator::ValueGradient FieldEvaluator::value_and_gradient(const Vec2 &x, Side side) const
{
  return evaluate(x, resolve(x, side), true);
}

complex evaluate_field(const geometry::ResonatorArray &array, const WaveParams &params,
                       complex omega, const MultipoleDensity &density, const Vec2 &x, Side side)
{
  return FieldEvaluator(array, params, omega, density).value(x, side);
}

}  // namespace cochlea::bie
