// SPDX-License-Identifier: Apache-2.0
#include "cochlea/geometry.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cochlea::geometry
{

ResonatorArray build_graded_array(int n, double first_radius, double s, double gap_ratio,
                                  double source_x)
{
  if (n < 1)
    throw InvalidInput("resonator count must be at least 1");
  if (!(first_radius > 0.0) || !std::isfinite(first_radius))
    throw InvalidInput("first_radius must be positive");
  if (!(s > 0.0) || !std::isfinite(s))
    throw InvalidInput("grading factor s must be positive");
  if (!(gap_ratio > 0.0) || !std::isfinite(gap_ratio))
    throw InvalidInput("gap_ratio must be positive");
  if (!(source_x < 0.0) || !std::isfinite(source_x))
    throw InvalidInput("source_x must lie left of the leftmost circle (x1 < 0)");

  ResonatorArray array;
  array.grading_factor = s;
  array.source = Vec2(source_x, 0.0);
  array.resonators.reserve(static_cast<std::size_t>(n));

  double radius = first_radius;
  double left_edge = 0.0;
  for (int i = 0; i < n; ++i)
  {
    array.resonators.push_back({Vec2(left_edge + radius, 0.0), radius});
    left_edge += 2.0 * radius + gap_ratio * radius;
    radius *= s;
  }

  const auto violations = validate_array(array);
  if (!violations.empty())
    throw InvalidInput("invalid array: " + violations.front());
  return array;
}

std::vector<std::string> validate_array(const ResonatorArray &array)
{
  std::vector<std::string> out;
  const auto &rs = array.resonators;
  if (rs.empty())
    out.emplace_back("array has no resonators");
  if (!(array.grading_factor > 0.0))
    out.emplace_back("grading factor must be positive");

  for (std::size_t i = 0; i < rs.size(); ++i)
  {
    std::ostringstream msg;
    if (!(rs[i].radius > 0.0) || !std::isfinite(rs[i].radius))
    {
      msg << "resonator " << i << " has non-positive radius " << rs[i].radius;
      out.push_back(msg.str());
    }
    if (rs[i].center.y() != 0.0)
    {
      msg.str("");
      msg << "resonator " << i << " center is off the line x2 = 0";
      out.push_back(msg.str());
    }
    if (i > 0 && !(rs[i].center.x() > rs[i - 1].center.x()))
    {
      msg.str("");
      msg << "resonators " << i - 1 << " and " << i << " are not ordered by x1";
      out.push_back(msg.str());
    }
  }

  for (std::size_t i = 0; i < rs.size(); ++i)
    for (std::size_t j = i + 1; j < rs.size(); ++j)
    {
      const double d = (rs[i].center - rs[j].center).norm();
      if (!(d > rs[i].radius + rs[j].radius))
      {
        std::ostringstream msg;
        msg << "resonators " << i << " and " << j << " overlap (center distance " << d
            << " <= " << rs[i].radius + rs[j].radius << ")";
        out.push_back(msg.str());
      }
    }

  for (std::size_t i = 0; i < rs.size(); ++i)
  {
    if (!((array.source - rs[i].center).norm() > rs[i].radius))
    {
      std::ostringstream msg;
      msg << "source lies inside or on resonator " << i;
      out.push_back(msg.str());
    }
  }
  return out;
}

int containing_resonator(const ResonatorArray &array, const Vec2 &x)
{
  for (std::size_t i = 0; i < array.resonators.size(); ++i)
  {
    const auto &r = array.resonators[i];
    if ((x - r.center).norm() < r.radius)
      return static_cast<int>(i);
  }
  return -1;
}

double distance_to_boundary(const ResonatorArray &array, const Vec2 &x)
{
  double best = std::numeric_limits<double>::infinity();
  for (const auto &r : array.resonators)
    best = std::min(best, std::abs((x - r.center).norm() - r.radius));
  return best;
}

double array_width(const ResonatorArray &array)
{
  if (array.resonators.empty())
    return 0.0;
  const auto &first = array.resonators.front();
  const auto &last = array.resonators.back();
  return (last.center.x() + last.radius) - (first.center.x() - first.radius);
}

}  // namespace cochlea::geometry
