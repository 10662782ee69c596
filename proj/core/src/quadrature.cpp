// SPDX-License-Identifier: Apache-2.0
#include "cochlea/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace cochlea::quadrature
{

Rule1D gauss_legendre(int n, double a, double b)
{
  if (n < 1)
    throw InvalidInput("Gauss-Legendre rule needs at least one node");
  // Jacobi matrix of the Legendre recurrence.
  RVector diag = RVector::Zero(n);
  RVector sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k)
    sub(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::SelfAdjointEigenSolver<RMatrix> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);

  Rule1D rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (int k = 0; k < n; ++k)
  {
    const double v0 = solver.eigenvectors()(0, k);
    rule.nodes[static_cast<std::size_t>(k)] = mid + half * solver.eigenvalues()(k);
    rule.weights[static_cast<std::size_t>(k)] = 2.0 * v0 * v0 * half;
  }
  return rule;
}

PlanarRule disk_rule(const Vec2 &centre, double radius, int radial, int angular)
{
  if (radial < 1 || angular < 1)
    throw InvalidInput("disk rule needs positive node counts");
  const Rule1D r = gauss_legendre(radial, 0.0, radius);
  PlanarRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(radial * angular));
  rule.weights.reserve(static_cast<std::size_t>(radial * angular));
  const double dtheta = 2.0 * pi / angular;
  for (int a = 0; a < angular; ++a)
  {
    const double theta = a * dtheta;
    const Vec2 dir(std::cos(theta), std::sin(theta));
    for (int k = 0; k < radial; ++k)
    {
      const double rk = r.nodes[static_cast<std::size_t>(k)];
      rule.nodes.push_back(centre + rk * dir);
      rule.weights.push_back(r.weights[static_cast<std::size_t>(k)] * rk * dtheta);
    }
  }
  return rule;
}

CurveRule circle_rule(const Vec2 &centre, double radius, int points)
{
  if (points < 1)
    throw InvalidInput("circle rule needs at least one point");
  CurveRule rule;
  const double dtheta = 2.0 * pi / points;
  for (int a = 0; a < points; ++a)
  {
    const double theta = a * dtheta;
    const Vec2 dir(std::cos(theta), std::sin(theta));
    rule.nodes.push_back(centre + radius * dir);
    rule.normals.push_back(dir);
    rule.weights.push_back(radius * dtheta);
  }
  return rule;
}

CurveRule rectangle_boundary_rule(const Vec2 &lo, const Vec2 &hi, double panel_length, int order)
{
  if (!(hi.x() > lo.x()) || !(hi.y() > lo.y()))
    throw InvalidInput("rectangle must have positive extent");
  if (!(panel_length > 0.0) || order < 1)
    throw InvalidInput("invalid panel specification");
  const Rule1D base = gauss_legendre(order, 0.0, 1.0);
  CurveRule rule;
  struct Edge
  {
    Vec2 a, b, normal;
  };
  const Edge edges[4] = {
    {lo, Vec2(hi.x(), lo.y()), Vec2(0.0, -1.0)},
    {Vec2(hi.x(), lo.y()), hi, Vec2(1.0, 0.0)},
    {hi, Vec2(lo.x(), hi.y()), Vec2(0.0, 1.0)},
    {Vec2(lo.x(), hi.y()), lo, Vec2(-1.0, 0.0)},
  };
  for (const auto &e : edges)
  {
    const double len = (e.b - e.a).norm();
    const int panels = std::max(1, static_cast<int>(std::ceil(len / panel_length)));
    const double h = len / panels;
    const Vec2 dir = (e.b - e.a) / len;
    for (int p = 0; p < panels; ++p)
      for (std::size_t k = 0; k < base.nodes.size(); ++k)
      {
        rule.nodes.push_back(e.a + (p + base.nodes[k]) * h * dir);
        rule.normals.push_back(e.normal);
        rule.weights.push_back(base.weights[k] * h);
      }
  }
  return rule;
}

}  // namespace cochlea::quadrature
