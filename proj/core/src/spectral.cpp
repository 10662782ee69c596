// SPDX-License-Identifier: Apache-2.0
#include "cochlea/spectral.hpp"

#include "cochlea/parallel.hpp"
#include "cochlea/quadrature.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cochlea::spectral
{

namespace
{

using MatrixFunction = std::function<CMatrix(complex)>;

constexpr double merge_tolerance = 1e-8;

double smallest_singular_value(const CMatrix &A)
{
  Eigen::BDCSVD<CMatrix> svd(A);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

// ||A v|| for the right-singular vector v of the smallest singular value;
// unlike the singular value itself this is never flushed to zero.
double null_residual(const CMatrix &A)
{
  Eigen::BDCSVD<CMatrix> svd(A, Eigen::ComputeFullV);
  return (A * svd.matrixV().col(A.cols() - 1)).norm();
}

bool contains_root(const std::vector<complex> &roots, complex z)
{
  return std::any_of(roots.begin(), roots.end(), [&](complex r) {
    return std::abs(r - z) <= merge_tolerance * std::abs(r);
  });
}

struct Window
{
  double lo;
  double hi;
};

// Muller on det A(w) / det A(seed) / prod (w - r) for the deflation roots.
MullerResult refine_root(const MatrixFunction &A, complex seed, const std::vector<complex> &deflate,
                         double spread)
{
  const complex ref = log_determinant(A(seed));
  auto f = [&](complex w) {
    complex value = std::exp(log_determinant(A(w)) - ref);
    for (complex r : deflate)
      value /= (w - r);
    return value;
  };
  return muller(f, seed * (1.0 - spread), seed * (1.0 + spread), seed * complex(1.0, spread));
}

bool acceptable(const MatrixFunction &A, const MullerResult &m, const Window &w, double tolerance,
                double *residual)
{
  if (!m.converged || !std::isfinite(m.root.real()) || !std::isfinite(m.root.imag()))
    return false;
  if (!(m.root.real() > 0.0) || m.root.real() > w.hi)
    return false;
  *residual = null_residual(A(m.root));
  return *residual <= tolerance;
}

// Scan sigma_min on a grid, then refine local minima (and extra seeds) by
// Muller iteration; deflate if plain refinement misses roots.
std::vector<std::pair<complex, double>> locate_roots(const MatrixFunction &A,
                                                     std::size_t expected,
                                                     const std::vector<complex> &extra_seeds,
                                                     const Window &window,
                                                     const SearchOptions &search)
{
  const int nx = std::max(search.grid_points, 8);
  const double imag_fractions[3] = {0.15, 0.0, -0.15};
  const double ratio = std::pow(window.hi / window.lo, 1.0 / (nx - 1));
  std::vector<complex> grid;
  grid.reserve(static_cast<std::size_t>(3 * nx));
  for (double eta : imag_fractions)
    for (int k = 0; k < nx; ++k)
    {
      const double x = window.lo * std::pow(ratio, k);
      grid.emplace_back(x, eta * x);
    }
  std::vector<double> sigma(grid.size());
  parallel_for(grid.size(), search.threads,
               [&](std::size_t i) { sigma[i] = smallest_singular_value(A(grid[i])); });

  // Local minima along each scan line, most pronounced first.
  std::vector<std::pair<double, complex>> minima;
  for (int row = 0; row < 3; ++row)
    for (int k = 0; k < nx; ++k)
    {
      const std::size_t i = static_cast<std::size_t>(row * nx + k);
      const double left = k > 0 ? sigma[i - 1] : std::numeric_limits<double>::infinity();
      const double right = k + 1 < nx ? sigma[i + 1] : std::numeric_limits<double>::infinity();
      if (sigma[i] < left && sigma[i] <= right)
        minima.emplace_back(sigma[i], grid[i]);
    }
  std::stable_sort(minima.begin(), minima.end(),
                   [](const auto &a, const auto &b) { return a.first < b.first; });

  std::vector<complex> seeds = extra_seeds;
  for (const auto &m : minima)
    seeds.push_back(m.second);

  std::vector<MullerResult> refined(seeds.size());
  parallel_for(seeds.size(), search.threads,
               [&](std::size_t i) { refined[i] = refine_root(A, seeds[i], {}, 0.01); });

  std::vector<complex> roots;
  std::vector<double> residuals;
  auto accept = [&](const MullerResult &m) {
    double residual = 0.0;
    if (!acceptable(A, m, window, search.tolerance, &residual) || contains_root(roots, m.root))
      return;
    roots.push_back(m.root);
    residuals.push_back(residual);
  };
  for (const auto &m : refined)
    accept(m);

  // Deflation pass for roots hidden behind already-found neighbours.
  for (std::size_t i = 0; i < seeds.size() && roots.size() < expected; ++i)
    accept(refine_root(A, seeds[i], roots, 0.01));

  std::vector<std::pair<complex, double>> out;
  for (std::size_t i = 0; i < roots.size(); ++i)
    out.emplace_back(roots[i], residuals[i]);
  std::stable_sort(out.begin(), out.end(),
                   [](const auto &a, const auto &b) { return a.first.real() < b.first.real(); });
  return out;
}

// Resonance of a single disk of radius R from the monopole asymptotics,
// polished against the full single-disk system.
complex isolated_resonance(double radius, const bie::WaveParams &params, int M)
{
  constexpr double euler_gamma = 0.57721566490153286;
  complex w = std::sqrt(2.0 * params.delta) * params.v_b / radius;
  for (int it = 0; it < 60; ++it)
  {
    const complex L = std::log(w * radius / (2.0 * params.v)) + euler_gamma;
    w = std::sqrt(params.v_b * params.v_b * 2.0 * params.delta /
                  (radius * radius * (-L - I * pi / 2.0)));
  }
  geometry::ResonatorArray single;
  single.resonators.push_back({Vec2(radius, 0.0), radius});
  single.source = Vec2(-radius, 0.0);
  const MatrixFunction A = [&](complex omega) {
    return bie::assemble_boundary_system(single, params, omega, M).matrix;
  };
  const auto m = refine_root(A, w, {}, 0.01);
  return m.converged && m.root.real() > 0.0 ? m.root : w;
}

std::string describe_count(std::size_t found, std::size_t expected, const Window &w)
{
  std::ostringstream msg;
  msg << "resonance search found " << found << " candidates, expected " << expected
      << " in window (" << w.lo << ", " << w.hi << "]";
  return msg.str();
}

std::vector<Resonance> search_with(const MatrixFunction &A_M, const MatrixFunction &A_M2,
                                   std::size_t expected, const std::vector<complex> &seeds,
                                   const Window &window, int M, const SearchOptions &search)
{
  const auto roots = locate_roots(A_M, expected, seeds, window, search);
  if (roots.size() != expected)
    throw ConvergenceError(describe_count(roots.size(), expected, window),
                           roots.empty() ? 0.0 : roots.back().second);

  std::vector<Resonance> out(roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i)
    out[i] = {roots[i].first, roots[i].second, M, -1.0};

  if (search.check_refinement)
  {
    std::vector<MullerResult> refined(out.size());
    parallel_for(out.size(), search.threads, [&](std::size_t i) {
      refined[i] = refine_root(A_M2, out[i].omega, {}, 1e-4);
    });
    for (std::size_t i = 0; i < out.size(); ++i)
    {
      if (!refined[i].converged)
        throw ConvergenceError("refinement M -> M+2 did not converge", out[i].residual);
      out[i].refinement_drift =
        std::abs(refined[i].root - out[i].omega) / std::abs(out[i].omega);
      if (!(out[i].refinement_drift < search.refinement_tolerance))
      {
        std::ostringstream msg;
        msg << "resonance " << out[i].omega << " moved by " << out[i].refinement_drift
            << " (relative) under M -> M+2";
        throw ConvergenceError(msg.str(), out[i].residual);
      }
    }
  }
  return out;
}

Window window_for(const geometry::ResonatorArray &array, const bie::WaveParams &params,
                  const SearchOptions &search)
{
  const double hi = search.omega_max > 0.0 ? search.omega_max : subwavelength_cutoff(array, params);
  if (!(search.omega_min_fraction > 0.0 && search.omega_min_fraction < 1.0))
    throw InvalidInput("omega_min_fraction must lie in (0, 1)");
  return {hi * search.omega_min_fraction, hi};
}

std::size_t largest_resonator(const geometry::ResonatorArray &array)
{
  std::size_t best = 0;
  for (std::size_t i = 1; i < array.size(); ++i)
    if (array.resonators[i].radius >= array.resonators[best].radius)
      best = i;
  return best;
}

Eigenmode normalise(const geometry::ResonatorArray &array, const bie::WaveParams &params,
                    const Resonance &resonance, const CVector &stacked,
                    const NormalizationRule &rule)
{
  auto density = bie::MultipoleDensity::from_stacked(stacked, array.size(), resonance.M);
  bie::FieldEvaluator field(array, params, resonance.omega, density);

  double norm2 = 0.0;
  complex mean = 0.0;
  double area = 0.0;
  const std::size_t big = largest_resonator(array);
  for (std::size_t i = 0; i < array.size(); ++i)
  {
    const auto &r = array.resonators[i];
    const auto q = quadrature::disk_rule(r.center, r.radius, rule.radial, rule.angular);
    for (std::size_t k = 0; k < q.size(); ++k)
    {
      const complex u = field.value(q.nodes[k], bie::Side::interior);
      norm2 += q.weights[k] * std::norm(u);
      if (i == big)
      {
        mean += q.weights[k] * u;
        area += q.weights[k];
      }
    }
  }
  mean /= area;
  if (!(norm2 > 0.0) || std::abs(mean) == 0.0)
    throw ConvergenceError("eigenmode has vanishing interior norm or mean", norm2);
  const complex c = std::conj(mean) / std::abs(mean) / std::sqrt(norm2);
  field.scale(c);
  return Eigenmode{resonance, std::move(density), c, std::move(field)};
}

CVector null_vector(const CMatrix &A, const char *what)
{
  Eigen::BDCSVD<CMatrix> svd(A, Eigen::ComputeFullV);
  const auto &s = svd.singularValues();
  const Eigen::Index n = s.size();
  if (n >= 2 && s(n - 2) <= 1e-9 * s(0))
  {
    std::ostringstream msg;
    msg << what << ": smallest singular value is degenerate (" << s(n - 1) << ", " << s(n - 2)
        << "); split by symmetry";
    throw ConvergenceError(msg.str(), s(n - 1));
  }
  return svd.matrixV().col(n - 1);
}

}  // namespace

double subwavelength_cutoff(const geometry::ResonatorArray &array, const bie::WaveParams &params)
{
  double rmax = 0.0;
  for (const auto &r : array.resonators)
    rmax = std::max(rmax, r.radius);
  if (!(rmax > 0.0))
    throw InvalidInput("array has no resonators");
  return 2.0 * pi * std::min(params.v, params.v_b) / (20.0 * rmax);
}

double sigma_min(const geometry::ResonatorArray &array, const bie::WaveParams &params,
                 complex omega, int M)
{
  return null_residual(bie::assemble_boundary_system(array, params, omega, M).matrix);
}

std::vector<Resonance> find_resonances(const geometry::ResonatorArray &array,
                                       const bie::WaveParams &params, int M,
                                       const SearchOptions &search)
{
  params.validate();
  const Window window = window_for(array, params, search);
  const MatrixFunction A = [&](complex w) {
    return bie::assemble_boundary_system(array, params, w, M).matrix;
  };
  const MatrixFunction A2 = [&](complex w) {
    return bie::assemble_boundary_system(array, params, w, M + 2).matrix;
  };
  std::vector<complex> seeds;
  for (const auto &r : array.resonators)
  {
    const complex s = isolated_resonance(r.radius, params, M);
    if (s.real() > window.lo && s.real() < window.hi && !contains_root(seeds, s))
      seeds.push_back(s);
  }
  return search_with(A, A2, array.size(), seeds, window, M, search);
}

Eigenmode extract_eigenmode(const geometry::ResonatorArray &array, const bie::WaveParams &params,
                            const Resonance &resonance, const NormalizationRule &rule)
{
  const auto sys = bie::assemble_boundary_system(array, params, resonance.omega, resonance.M);
  return normalise(array, params, resonance, null_vector(sys.matrix, "extract_eigenmode"), rule);
}

std::vector<Eigenmode> extract_eigenmodes(const geometry::ResonatorArray &array,
                                          const bie::WaveParams &params,
                                          const std::vector<Resonance> &resonances,
                                          const NormalizationRule &rule)
{
  std::vector<Eigenmode> out;
  out.reserve(resonances.size());
  for (const auto &r : resonances)
    out.push_back(extract_eigenmode(array, params, r, rule));
  return out;
}

std::optional<double> mirror_axis(const geometry::ResonatorArray &array, double tol)
{
  const auto &rs = array.resonators;
  if (rs.empty())
    return std::nullopt;
  const double a = 0.5 * (rs.front().center.x() + rs.back().center.x());
  const std::size_t n = rs.size();
  for (std::size_t j = 0; j < n; ++j)
  {
    const auto &p = rs[j];
    const auto &q = rs[n - 1 - j];
    if (std::abs((2.0 * a - p.center.x()) - q.center.x()) > tol ||
        std::abs(p.center.y() - q.center.y()) > tol || std::abs(p.radius - q.radius) > tol)
      return std::nullopt;
  }
  return a;
}

RMatrix mirror_operator(const geometry::ResonatorArray &array, int M)
{
  if (!mirror_axis(array))
    throw InvalidInput("array is not mirror symmetric");
  const std::size_t N = array.size();
  const int K = 2 * M + 1;
  const Eigen::Index dim = static_cast<Eigen::Index>(2 * N) * K;
  RMatrix P = RMatrix::Zero(dim, dim);
  // (P c)^{(j')}_m = (-1)^m c^{(j)}_{-m}, with j' the mirror image of j.
  for (int block = 0; block < 2; ++block)
    for (std::size_t j = 0; j < N; ++j)
    {
      const std::size_t jm = N - 1 - j;
      for (int m = -M; m <= M; ++m)
      {
        const Eigen::Index row = static_cast<Eigen::Index>((block * N + jm) * K + (m + M));
        const Eigen::Index col = static_cast<Eigen::Index>((block * N + j) * K + (-m + M));
        P(row, col) = (m % 2 == 0) ? 1.0 : -1.0;
      }
    }
  return P;
}

RMatrix parity_basis(const geometry::ResonatorArray &array, int M, int parity)
{
  if (parity != 1 && parity != -1)
    throw InvalidInput("parity must be +1 or -1");
  const RMatrix P = mirror_operator(array, M);
  const Eigen::Index dim = P.rows();
  std::vector<RVector> columns;
  std::vector<bool> used(static_cast<std::size_t>(dim), false);
  for (Eigen::Index k = 0; k < dim; ++k)
  {
    if (used[static_cast<std::size_t>(k)])
      continue;
    Eigen::Index image = 0;
    P.col(k).cwiseAbs().maxCoeff(&image);
    const double sign = P(image, k);
    used[static_cast<std::size_t>(k)] = used[static_cast<std::size_t>(image)] = true;
    RVector v = RVector::Zero(dim);
    if (image == k)
    {
      if (sign != parity)
        continue;
      v(k) = 1.0;
    }
    else
    {
      v(k) = 1.0 / std::sqrt(2.0);
      v(image) = parity * sign / std::sqrt(2.0);
    }
    columns.push_back(v);
  }
  RMatrix Q(dim, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c)
    Q.col(static_cast<Eigen::Index>(c)) = columns[c];
  return Q;
}

std::vector<Resonance> find_parity_resonances(const geometry::ResonatorArray &array,
                                              const bie::WaveParams &params, int M, int parity,
                                              std::size_t count, const SearchOptions &search)
{
  params.validate();
  const Window window = window_for(array, params, search);
  const CMatrix Q = parity_basis(array, M, parity).cast<complex>();
  const CMatrix Q2 = parity_basis(array, M + 2, parity).cast<complex>();
  const MatrixFunction A = [&](complex w) -> CMatrix {
    return Q.adjoint() * bie::assemble_boundary_system(array, params, w, M).matrix * Q;
  };
  const MatrixFunction A2 = [&](complex w) -> CMatrix {
    return Q2.adjoint() * bie::assemble_boundary_system(array, params, w, M + 2).matrix * Q2;
  };
  std::vector<complex> seeds;
  for (const auto &r : array.resonators)
  {
    const complex s = isolated_resonance(r.radius, params, M);
    if (!contains_root(seeds, s))
      seeds.push_back(s);
  }
  return search_with(A, A2, count, seeds, window, M, search);
}

Eigenmode extract_parity_eigenmode(const geometry::ResonatorArray &array,
                                   const bie::WaveParams &params, const Resonance &resonance,
                                   int parity, const NormalizationRule &rule)
{
  const CMatrix Q = parity_basis(array, resonance.M, parity).cast<complex>();
  const auto sys = bie::assemble_boundary_system(array, params, resonance.omega, resonance.M);
  const CMatrix B = Q.adjoint() * sys.matrix * Q;
  const CVector y = null_vector(B, "extract_parity_eigenmode");
  return normalise(array, params, resonance, Q * y, rule);
}

MullerResult muller(const ScalarFunction &f, complex x0, complex x1, complex x2, double rel_tol,
                    int max_iter)
{
  complex f0 = f(x0), f1 = f(x1), f2 = f(x2);
  MullerResult out{x2, 0, false};
  for (int it = 1; it <= max_iter; ++it)
  {
    const complex q = (x2 - x1) / (x1 - x0);
    const complex a = q * f2 - q * (1.0 + q) * f1 + q * q * f0;
    const complex b = (2.0 * q + 1.0) * f2 - (1.0 + q) * (1.0 + q) * f1 + q * q * f0;
    const complex c = (1.0 + q) * f2;
    const complex disc = std::sqrt(b * b - 4.0 * a * c);
    const complex den = std::abs(b + disc) >= std::abs(b - disc) ? b + disc : b - disc;
    if (den == 0.0 || !std::isfinite(std::abs(den)))
      return out;
    const complex x3 = x2 - (x2 - x1) * 2.0 * c / den;
    x0 = x1;
    x1 = x2;
    x2 = x3;
    f0 = f1;
    f1 = f2;
    f2 = f(x3);
    out.root = x3;
    out.iterations = it;
    if (!std::isfinite(std::abs(x3)))
      return out;
    if (f2 == 0.0 || std::abs(x2 - x1) <= rel_tol * std::abs(x2))
    {
      out.converged = true;
      return out;
    }
  }
  return out;
}

complex log_determinant(const CMatrix &A)
{
  Eigen::PartialPivLU<CMatrix> lu(A);
  const auto &LU = lu.matrixLU();
  complex sum = 0.0;
  for (Eigen::Index i = 0; i < LU.rows(); ++i)
    sum += std::log(LU(i, i));
  if (lu.permutationP().determinant() < 0)
    sum += I * pi;
  return sum;
}

}  // namespace cochlea::spectral
