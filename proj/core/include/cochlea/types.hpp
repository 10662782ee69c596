// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cochlea
{

using complex = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr complex I{0.0, 1.0};

/// Invalid geometry or parameters supplied by the caller.
class InvalidInput : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative method failed to meet its tolerance.
class ConvergenceError : public std::runtime_error
{
public:
  ConvergenceError(const std::string &what, double last_residual)
    : std::runtime_error(what), last_residual_(last_residual)
  {
  }

  double last_residual() const noexcept { return last_residual_; }

private:
  double last_residual_;
};

/// A numerical quantity left its representable or supported range.
class RangeError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

}  // namespace cochlea
