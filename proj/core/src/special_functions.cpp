// SPDX-License-Identifier: Apache-2.0
#include "cochlea/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cochlea::special
{

namespace
{

constexpr double euler_gamma = 0.57721566490153286060651209;
constexpr double eps = std::numeric_limits<double>::epsilon();
constexpr double asymptotic_radius = 17.0;
constexpr double upper_half_cutoff = 4.0;
constexpr double rescale_threshold = 1e250;

bool is_finite(complex z)
{
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

void check_argument(complex z)
{
  if (!is_finite(z) || std::abs(z) > max_argument)
  {
    throw RangeError("cylinder function argument out of supported range: |z| = " +
                     std::to_string(std::abs(z)));
  }
}

double reflection_sign(int n)
{
  return (n % 2 == 0) ? 1.0 : -1.0;
}

struct BackwardSweep
{
  std::vector<complex> j;  // orders 0..max_order
  complex y0;
  complex y1;
  double error_scale;  // magnitude the absolute error is proportional to
};

// Start order for the backward sweep: walk upward from the highest needed
// order until the conservative decay bound prod min(1, |z|/m) of the
// minimal solution drops below 1e-20, then add a safety margin.
int start_order(int max_order, double abs_z)
{
  const int top = std::max(max_order, static_cast<int>(std::ceil(abs_z)));
  const int cap = top + 30 + static_cast<int>(std::sqrt(160.0 * (top + 1)));
  int k = std::max(max_order, 1);
  double bound = 1.0;
  while (bound > 1e-20 && k < cap)
  {
    ++k;
    bound *= std::min(1.0, abs_z / k);
  }
  const int start = std::min(cap, k + 8);
  return start + (start % 2);
}

// Miller's algorithm. Y_0 and Y_1 follow from the Neumann expansions
//   Y_0 = (2/pi)(log(z/2)+gamma) J_0 - (4/pi) sum_k (-1)^k J_{2k} / k
//   Y_1 = (2/pi)[(log(z/2)+gamma) J_1 - J_0/z]
//         + (4/pi) sum_k (-1)^k (J_{2k-1} - J_{2k+1}) / (2k)
BackwardSweep backward_sweep(int max_order, complex z, bool with_y)
{
  const int top = std::max(max_order, 1);
  const int start = start_order(top, std::abs(z));
  // e^{iz} = J_0 + 2 sum i^n J_n grows like the J_n themselves when Im z < 0;
  // the conjugate identity is used in the upper half plane.
  const complex unit = (z.imag() > 0.0) ? -I : I;

  std::vector<complex> f(static_cast<std::size_t>(top) + 1, complex{});
  complex next{0.0};
  complex current{1e-30};
  complex norm{0.0};
  complex ysum0{0.0};
  complex ysum1{0.0};
  // unit^k cycles through four values; track the exponent instead of dividing.
  const auto unit_power_of = [&unit](int k) {
    switch (k % 4)
    {
    case 0: return complex{1.0};
    case 1: return unit;
    case 2: return complex{-1.0};
    default: return -unit;
    }
  };

  for (int k = start; k >= 0; --k)
  {
    if (k <= top)
    {
      f[static_cast<std::size_t>(k)] = current;
    }
    if (k == 0)
    {
      norm += current;
    }
    else
    {
      norm += 2.0 * unit_power_of(k) * current;
    }
    if (with_y)
    {
      if (k > 0 && k % 2 == 0)
      {
        const int half = k / 2;
        ysum0 += reflection_sign(half) * current / static_cast<double>(half);
      }
      if (k % 2 == 1)
      {
        // term k = 2m-1 contributes (-1)^m f_{2m-1}/(2m); term 2m+1 contributes
        // -(-1)^m f_{2m+1}/(2m), i.e. for odd k: (-1)^{(k+1)/2} f_k/(k+1)
        // from m = (k+1)/2 and -(-1)^{(k-1)/2} f_k/(k-1) from m = (k-1)/2.
        const int m_hi = (k + 1) / 2;
        ysum1 += reflection_sign(m_hi) * current / static_cast<double>(2 * m_hi);
        const int m_lo = (k - 1) / 2;
        if (m_lo >= 1)
        {
          ysum1 -= reflection_sign(m_lo) * current / static_cast<double>(2 * m_lo);
        }
      }
    }
    if (k == 0)
    {
      break;
    }
    const complex previous = (2.0 * k / z) * current - next;
    next = current;
    current = previous;
    if (std::abs(current) > rescale_threshold)
    {
      const double s = 1.0 / rescale_threshold;
      current *= s;
      next *= s;
      norm *= s;
      ysum0 *= s;
      ysum1 *= s;
      for (int idx = k; idx <= top; ++idx)
      {
        f[static_cast<std::size_t>(idx)] *= s;
      }
    }
  }

  const complex target = std::exp(unit * z);
  const complex scale = target / norm;
  BackwardSweep out;
  out.j.resize(static_cast<std::size_t>(max_order) + 1);
  for (int n = 0; n <= max_order; ++n)
  {
    out.j[static_cast<std::size_t>(n)] = scale * f[static_cast<std::size_t>(n)];
  }
  out.error_scale = std::abs(target);
  if (with_y)
  {
    const complex j0 = scale * f[0];
    const complex j1 = scale * f[1];
    const complex log_term = std::log(z / 2.0) + euler_gamma;
    out.y0 = (2.0 / pi) * log_term * j0 - (4.0 / pi) * scale * ysum0;
    out.y1 = (2.0 / pi) * (log_term * j1 - j0 / z) + (4.0 / pi) * scale * ysum1;
    out.error_scale = std::max(out.error_scale, std::abs(out.y0) + std::abs(out.y1));
  }
  return out;
}

struct HankelPair
{
  complex h0;
  complex h1;
  double abs_error;
};

// Hankel's expansion, truncated at the smallest term.
complex hankel_asymptotic(int nu, complex z, double &tail)
{
  const double mu = 4.0 * nu * nu;
  const complex chi = z - (nu * pi / 2.0) - pi / 4.0;
  complex sum{1.0};
  complex term{1.0};
  double last = 1.0;
  for (int k = 1; k < 60; ++k)
  {
    const double odd = 2.0 * k - 1.0;
    term *= I * (mu - odd * odd) / (k * 8.0 * z);
    const double size = std::abs(term);
    if (size > last)
    {
      break;
    }
    sum += term;
    last = size;
    if (size < eps * std::abs(sum))
    {
      break;
    }
  }
  tail = last;
  return std::sqrt(2.0 / (pi * z)) * std::exp(I * chi) * sum;
}

// K_0(w), K_1(w) for Re w large enough, Steed's method with Temme's CF2
// (Numerical Recipes, bessik) at order zero.
void bessel_k01(complex w, complex &k0, complex &k1)
{
  const double a1 = 0.25;
  complex b = 2.0 * (1.0 + w);
  complex d = 1.0 / b;
  complex h = d;
  complex delh = d;
  complex q1{0.0};
  complex q2{1.0};
  complex q{a1};
  complex c{a1};
  complex a{-a1};
  complex s = 1.0 + q * delh;
  int i = 2;
  for (; i < 100000; ++i)
  {
    a -= 2.0 * (i - 1);
    c = -a * c / static_cast<double>(i);
    const complex qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const complex dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < eps)
    {
      break;
    }
  }
  if (i >= 100000)
  {
    throw ConvergenceError("K continued fraction did not converge", 0.0);
  }
  h = a1 * h;
  k0 = std::sqrt(pi / (2.0 * w)) * std::exp(-w) / s;
  k1 = k0 * (w + 0.5 - h) / w;
}

HankelPair hankel01(complex z)
{
  if (z.imag() > upper_half_cutoff)
  {
    // H^{(1)}_nu(z) = (2/(i pi)) e^{-i nu pi/2} K_nu(-iz)
    complex k0;
    complex k1;
    bessel_k01(-I * z, k0, k1);
    const complex h0 = (2.0 / (I * pi)) * k0;
    const complex h1 = -(2.0 / pi) * k1;
    return {h0, h1, 16.0 * eps * (std::abs(h0) + std::abs(h1))};
  }
  if (std::abs(z) >= asymptotic_radius)
  {
    double tail0 = 0.0;
    double tail1 = 0.0;
    const complex h0 = hankel_asymptotic(0, z, tail0);
    const complex h1 = hankel_asymptotic(1, z, tail1);
    return {h0, h1,
            std::abs(h0) * (tail0 + 4.0 * eps) + std::abs(h1) * (tail1 + 4.0 * eps)};
  }
  const BackwardSweep sweep = backward_sweep(1, z, true);
  const complex h0 = sweep.j[0] + I * sweep.y0;
  const complex h1 = sweep.j[1] + I * sweep.y1;
  return {h0, h1, 64.0 * eps * sweep.error_scale};
}

struct HankelSequence
{
  std::vector<complex> h;
  double abs_error;
};

HankelSequence hankel_sequence(int max_order, complex z)
{
  check_argument(z);
  if (z == complex{0.0})
  {
    throw RangeError("Hankel function is singular at z = 0");
  }
  const HankelPair pair = hankel01(z);
  HankelSequence out;
  out.h.resize(static_cast<std::size_t>(std::max(max_order, 1)) + 1);
  out.h[0] = pair.h0;
  out.h[1] = pair.h1;
  double growth = 1.0;
  for (int n = 1; n < max_order; ++n)
  {
    out.h[static_cast<std::size_t>(n) + 1] =
        (2.0 * n / z) * out.h[static_cast<std::size_t>(n)] - out.h[static_cast<std::size_t>(n) - 1];
    growth += 1.0;
  }
  out.h.resize(static_cast<std::size_t>(max_order) + 1);
  for (const complex &value : out.h)
  {
    if (!is_finite(value))
    {
      throw RangeError("Hankel function overflow at order " + std::to_string(max_order) +
                       ", |z| = " + std::to_string(std::abs(z)));
    }
  }
  out.abs_error = pair.abs_error * growth;
  return out;
}

}  // namespace

std::vector<complex> bessel_j_orders(int max_order, complex z)
{
  if (max_order < 0)
  {
    throw InvalidInput("bessel_j_orders: negative max_order");
  }
  check_argument(z);
  if (z == complex{0.0})
  {
    std::vector<complex> out(static_cast<std::size_t>(max_order) + 1, complex{0.0});
    out[0] = 1.0;
    return out;
  }
  return backward_sweep(max_order, z, false).j;
}

std::vector<complex> hankel1_orders(int max_order, complex z)
{
  if (max_order < 0)
  {
    throw InvalidInput("hankel1_orders: negative max_order");
  }
  return hankel_sequence(max_order, z).h;
}

CylinderFunctionResult bessel_j_result(int order, complex z)
{
  const int n = std::abs(order);
  check_argument(z);
  if (z == complex{0.0})
  {
    return {n == 0 ? complex{1.0} : complex{0.0}, 0.0};
  }
  const BackwardSweep sweep = backward_sweep(n, z, false);
  const double sign = order < 0 ? reflection_sign(n) : 1.0;
  const complex value = sign * sweep.j[static_cast<std::size_t>(n)];
  return {value, 8.0 * eps * std::max(std::abs(value), sweep.error_scale)};
}

CylinderFunctionResult hankel1_result(int order, complex z)
{
  const int n = std::abs(order);
  const HankelSequence seq = hankel_sequence(n, z);
  const double sign = order < 0 ? reflection_sign(n) : 1.0;
  const complex value = sign * seq.h[static_cast<std::size_t>(n)];
  return {value, std::max(seq.abs_error, 4.0 * eps * std::abs(value))};
}

complex bessel_j(int order, complex z)
{
  return bessel_j_result(order, z).value;
}

complex hankel1(int order, complex z)
{
  return hankel1_result(order, z).value;
}

CylinderTable::CylinderTable(int max_order, complex z, bool with_hankel)
  : max_order_(max_order), z_(z)
{
  if (max_order < 0)
  {
    throw InvalidInput("CylinderTable: negative max_order");
  }
  j_ = bessel_j_orders(max_order + 1, z);
  if (with_hankel)
  {
    h_ = hankel1_orders(max_order + 1, z);
  }
}

complex CylinderTable::j(int n) const
{
  const int a = std::abs(n);
  const complex v = j_[static_cast<std::size_t>(a)];
  return n < 0 ? reflection_sign(a) * v : v;
}

complex CylinderTable::h(int n) const
{
  const int a = std::abs(n);
  const complex v = h_.at(static_cast<std::size_t>(a));
  return n < 0 ? reflection_sign(a) * v : v;
}

// C_n' = (C_{n-1} - C_{n+1}) / 2, valid for every integer n.
complex CylinderTable::dj(int n) const
{
  return 0.5 * (j(n - 1) - j(n + 1));
}

complex CylinderTable::dh(int n) const
{
  return 0.5 * (h(n - 1) - h(n + 1));
}

}  // namespace cochlea::special
