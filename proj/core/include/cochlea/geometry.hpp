// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cochlea/types.hpp"

#include <string>
#include <vector>

/// Graded linear arrays of circular resonators on the line x2 = 0.
namespace cochlea::geometry
{

struct Resonator
{
  Vec2 center = Vec2::Zero();
  double radius = 1.0;
};

struct ResonatorArray
{
  std::vector<Resonator> resonators;
  Vec2 source = Vec2::Zero();
  double grading_factor = 1.0;

  std::size_t size() const noexcept { return resonators.size(); }
};

/// Builds n circles with radius(i) = first_radius * s^i (0-based), the
/// gap between circle i and i+1 equal to gap_ratio * radius(i), and the
/// first circle touching x = 0 from the right. Throws InvalidInput for
/// non-positive parameters, overlap, or a source inside the array.
ResonatorArray build_graded_array(int n, double first_radius, double s, double gap_ratio,
                                  double source_x);

/// Human-readable descriptions of every violated array invariant; empty
/// when the array is valid.
std::vector<std::string> validate_array(const ResonatorArray &array);

/// Index of the resonator containing x (strictly inside), or -1.
int containing_resonator(const ResonatorArray &array, const Vec2 &x);

/// Distance from x to the nearest resonator boundary.
double distance_to_boundary(const ResonatorArray &array, const Vec2 &x);

/// Total extent along x1 from the leftmost to the rightmost circle edge.
double array_width(const ResonatorArray &array);

}  // namespace cochlea::geometry
