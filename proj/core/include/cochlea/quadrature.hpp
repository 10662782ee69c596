// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cochlea/types.hpp"

#include <vector>

/// Quadrature rules shared by the spectral and modal modules.
namespace cochlea::quadrature
{

struct Rule1D
{
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b] (Golub-Welsch).
Rule1D gauss_legendre(int n, double a = -1.0, double b = 1.0);

struct PlanarRule
{
  std::vector<Vec2> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

/// Polar rule on the disk |x - centre| < radius: Gauss-Legendre in r with
/// the Jacobian r, uniform trapezoid in theta (exact for trigonometric
/// polynomials of degree < angular).
PlanarRule disk_rule(const Vec2 &centre, double radius, int radial, int angular);

/// Boundary rule on a circle: nodes, outward unit normals and arc-length
/// weights of the periodic trapezoid rule.
struct CurveRule
{
  std::vector<Vec2> nodes;
  std::vector<Vec2> normals;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

CurveRule circle_rule(const Vec2 &centre, double radius, int points);

/// Composite Gauss-Legendre rule on the perimeter of the axis-aligned
/// rectangle [lo, hi], with outward normals; panels of length at most
/// `panel_length`, `order` nodes each.
CurveRule rectangle_boundary_rule(const Vec2 &lo, const Vec2 &hi, double panel_length,
                                  int order);

}  // namespace cochlea::quadrature
