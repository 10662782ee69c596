// SPDX-License-Identifier: Apache-2.0
#include "cochlea/hopf.hpp"

#include <Eigen/LU>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace cochlea::hopf
{

namespace
{

using modal::CubicTensor;
using modal::ModalSystem;

/// K_n(A, B, C) = sum_{ijk} A_i B_j conj(C_k) T[n][i][j][k].
CVector contract(const CubicTensor &T, const CVector &A, const CVector &B, const CVector &C)
{
  const auto N = T.size();
  CVector out = CVector::Zero(static_cast<Eigen::Index>(N));
  for (std::size_t n = 0; n < N; ++n)
  {
    complex acc = 0.0;
    for (std::size_t i = 0; i < N; ++i)
    {
      for (std::size_t j = 0; j < N; ++j)
      {
        const complex ab = A[i] * B[j];
        complex inner = 0.0;
        for (std::size_t k = 0; k < N; ++k)
          inner += T(n, i, j, k) * std::conj(C[k]);
        acc += ab * inner;
      }
    }
    out[n] = acc;
  }
  return out;
}

/// d K_n / d A_i = sum_{jk} T[n][i][j][k] B_j conj(C_k). By the (i, j)
/// symmetry of T this is also d K_n / d B_j with A in place of B.
CMatrix derivative_first(const CubicTensor &T, const CVector &B, const CVector &C)
{
  const auto N = static_cast<Eigen::Index>(T.size());
  CMatrix out = CMatrix::Zero(N, N);
  for (Eigen::Index n = 0; n < N; ++n)
    for (Eigen::Index i = 0; i < N; ++i)
    {
      complex acc = 0.0;
      for (Eigen::Index j = 0; j < N; ++j)
        for (Eigen::Index k = 0; k < N; ++k)
          acc += T(n, i, j, k) * B[j] * std::conj(C[k]);
      out(n, i) = acc;
    }
  return out;
}

/// d K_n / d conj(C_k) = sum_{ij} T[n][i][j][k] A_i B_j.
CMatrix derivative_conjugate(const CubicTensor &T, const CVector &A, const CVector &B)
{
  const auto N = static_cast<Eigen::Index>(T.size());
  CMatrix out = CMatrix::Zero(N, N);
  for (Eigen::Index n = 0; n < N; ++n)
    for (Eigen::Index k = 0; k < N; ++k)
    {
      complex acc = 0.0;
      for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j)
          acc += T(n, i, j, k) * A[i] * B[j];
      out(n, k) = acc;
    }
  return out;
}

CVector detuning(const ModalSystem &system, double Omega)
{
  CVector d(system.omegas.size());
  for (Eigen::Index m = 0; m < d.size(); ++m)
    d[m] = system.omegas[m] * system.omegas[m] - Omega * Omega;
  return d;
}

/// Residual function and its Jacobian split as dR = J1 dz + J2 conj(dz).
struct NewtonProblem
{
  std::function<CVector(const CVector &)> residual;
  std::function<std::pair<CMatrix, CMatrix>(const CVector &)> jacobian;
  /// Magnitude of the linear terms; used for the residual floor.
  double scale = 0.0;
  /// Optional offset so that convergence in step size is measured relative
  /// to the full amplitude rather than the unknown itself.
  CVector offset;
};

struct NewtonResult
{
  CVector z;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Real 2m x 2m matrix of dz -> J1 dz + J2 conj(dz) on stacked (Re, Im).
RMatrix realify(const CMatrix &J1, const CMatrix &J2)
{
  const Eigen::Index m = J1.rows();
  const CMatrix P = J1 + J2;
  const CMatrix Q = J1 - J2;
  RMatrix A(2 * m, 2 * m);
  A.topLeftCorner(m, m) = P.real();
  A.topRightCorner(m, m) = -Q.imag();
  A.bottomLeftCorner(m, m) = P.imag();
  A.bottomRightCorner(m, m) = Q.real();
  return A;
}

CVector solve_realified(const CMatrix &J1, const CMatrix &J2, const CVector &rhs)
{
  const Eigen::Index m = rhs.size();
  const RMatrix A = realify(J1, J2);
  RVector b(2 * m);
  b.head(m) = rhs.real();
  b.tail(m) = rhs.imag();
  const RVector x = A.partialPivLu().solve(b);
  CVector out(m);
  for (Eigen::Index i = 0; i < m; ++i)
    out[i] = complex(x[i], x[m + i]);
  return out;
}

NewtonResult damped_newton(const NewtonProblem &problem, CVector z, const NewtonOptions &options)
{
  NewtonResult result;
  CVector r = problem.residual(z);
  double rnorm = r.norm();
  const double floor = 1e-15 * problem.scale;
  const auto amplitude = [&](const CVector &v) {
    return problem.offset.size() == v.size() ? (v + problem.offset).norm() : v.norm();
  };
  const double initial_amplitude = std::max(amplitude(z), 1e-300);

  for (int it = 0; it < options.max_iterations; ++it)
  {
    if (!std::isfinite(rnorm))
      break;
    if (rnorm <= floor)
    {
      result.converged = true;
      break;
    }
    const auto [J1, J2] = problem.jacobian(z);
    const CVector step = solve_realified(J1, J2, -r);
    if (!step.allFinite())
      break;

    double lambda = 1.0;
    CVector trial;
    CVector trial_r;
    double trial_norm = 0.0;
    bool accepted = false;
    while (lambda >= 1.0 / 1024.0)
    {
      trial = z + lambda * step;
      trial_r = problem.residual(trial);
      trial_norm = trial_r.norm();
      if (std::isfinite(trial_norm) && trial_norm <= (1.0 - 1e-4 * lambda) * rnorm)
      {
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    ++result.iterations;
    const double step_norm = lambda * step.norm();
    if (!accepted)
    {
      // At the rounding floor the residual can no longer decrease; accept
      // convergence if the Newton correction itself is negligible.
      if (step.norm() <= 1e-12 * amplitude(z))
        result.converged = true;
      break;
    }
    z = trial;
    r = trial_r;
    rnorm = trial_norm;
    if (amplitude(z) > options.divergence_ratio * initial_amplitude &&
        amplitude(z) > options.divergence_ratio * 1e-300)
      break;
    if (step_norm <= 1e-13 * amplitude(z))
    {
      result.converged = true;
      break;
    }
  }
  result.z = std::move(z);
  result.residual = rnorm;
  return result;
}

/// Newton problem for the pure-tone deviation Y = X - X_passive.
NewtonProblem pure_tone_problem(const ModalSystem &system, double Omega, double F, double beta,
                                const CVector &passive)
{
  const CVector d = detuning(system, Omega);
  const CMatrix Gt = system.gram_inverse.transpose();
  const complex c = -I * beta * Omega * Omega * Omega;
  const CubicTensor &T = system.cubic;
  NewtonProblem p;
  p.offset = passive;
  p.scale = std::abs(F) * forcing_vector(system).norm();
  p.residual = [=, &T](const CVector &Y) -> CVector {
    const CVector X = passive + Y;
    return d.cwiseProduct(Y) + c * (Gt * contract(T, X, X, X));
  };
  p.jacobian = [=, &T](const CVector &Y) -> std::pair<CMatrix, CMatrix> {
    const CVector X = passive + Y;
    CMatrix J1 = c * (Gt * (2.0 * derivative_first(T, X, X)));
    J1.diagonal() += d;
    CMatrix J2 = c * (Gt * derivative_conjugate(T, X, X));
    return {J1, J2};
  };
  return p;
}

std::optional<CVector> try_pure_tone(const ModalSystem &system, double Omega, double F,
                                     double beta, const CVector &start, const NewtonOptions &opt,
                                     int &iterations)
{
  const CVector passive = solve_passive(system, Omega, F);
  const auto problem = pure_tone_problem(system, Omega, F, beta, passive);
  const auto result = damped_newton(problem, start - passive, opt);
  iterations += result.iterations;
  if (!result.converged)
    return std::nullopt;
  return result.z;  // deviation
}

std::string describe(const char *what, double a, double b)
{
  std::ostringstream os;
  os << what << " (Omega=" << a << ", F=" << b << ")";
  return os.str();
}

}  // namespace

CVector forcing_vector(const ModalSystem &system)
{
  return system.gram_inverse.transpose() * system.source_vec;
}

CVector solve_passive(const ModalSystem &system, double Omega, double F)
{
  const CVector g = forcing_vector(system);
  const CVector d = detuning(system, Omega);
  CVector X(g.size());
  for (Eigen::Index m = 0; m < g.size(); ++m)
  {
    const complex w2 = system.omegas[m] * system.omegas[m];
    if (std::abs(d[m]) < 1e-14 * std::abs(w2))
      throw RangeError("solve_passive: forcing frequency on a resonance (near-singular denominator)");
    X[m] = -F * g[m] / d[m];
  }
  return X;
}

CVector pure_tone_residual(const ModalSystem &system, double Omega, double F, double beta,
                           const CVector &X)
{
  const auto N = static_cast<Eigen::Index>(system.size());
  if (X.size() != N)
    throw InvalidInput("pure_tone_residual: amplitude vector has the wrong size");
  const CMatrix &G = system.gram_inverse;
  const CubicTensor &T = system.cubic;
  CVector out(N);
  for (Eigen::Index m = 0; m < N; ++m)
  {
    complex forcing = 0.0;
    complex cubic = 0.0;
    for (Eigen::Index n = 0; n < N; ++n)
    {
      forcing += G(n, m) * system.source_vec[n];
      complex tn = 0.0;
      for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j)
          for (Eigen::Index k = 0; k < N; ++k)
            tn += X[i] * X[j] * std::conj(X[k]) * T(n, i, j, k);
      cubic += G(n, m) * tn;
    }
    const complex w = system.omegas[m];
    out[m] = (w * w - Omega * Omega) * X[m] + F * forcing -
             I * Omega * Omega * Omega * beta * cubic;
  }
  return out;
}

PureToneSolution solve_pure_tone(const ModalSystem &system, double Omega, double F, double beta,
                                 const std::optional<CVector> &start,
                                 const NewtonOptions &options)
{
  if (!std::isfinite(Omega) || !std::isfinite(F) || !std::isfinite(beta))
    throw InvalidInput("solve_pure_tone: non-finite input");
  const auto N = static_cast<Eigen::Index>(system.size());
  if (start && start->size() != N)
    throw InvalidInput("solve_pure_tone: start vector has the wrong size");

  PureToneSolution sol;
  sol.Omega = Omega;
  sol.F = F;
  sol.beta = beta;

  const CVector passive = solve_passive(system, Omega, F);
  int iterations = 0;
  std::optional<CVector> deviation =
    try_pure_tone(system, Omega, F, beta, start ? *start : passive, options, iterations);
  if (!deviation && start)
    deviation = try_pure_tone(system, Omega, F, beta, passive, options, iterations);

  if (!deviation)
  {
    // Amplitude continuation: lower F until the passive start converges,
    // then climb back with the previous solution as the start.
    double f = F;
    std::optional<CVector> current;
    int steps = 0;
    while (steps < options.max_continuation_steps)
    {
      f *= 0.5;
      ++steps;
      current = try_pure_tone(system, Omega, f, beta, solve_passive(system, Omega, f), options,
                              iterations);
      if (current)
      {
        *current += solve_passive(system, Omega, f);
        break;
      }
    }
    if (!current)
      throw ConvergenceError(describe("solve_pure_tone: continuation found no start", Omega, F),
                             std::numeric_limits<double>::infinity());
    double factor = 2.0;
    while (f < F && steps < options.max_continuation_steps)
    {
      const double next = std::min(F, f * factor);
      ++steps;
      auto attempt = try_pure_tone(system, Omega, next, beta, *current, options, iterations);
      if (attempt)
      {
        *current = *attempt + solve_passive(system, Omega, next);
        f = next;
        if (f == F)
          deviation = attempt;
        factor = std::min(2.0, factor * factor);
      }
      else
      {
        factor = std::sqrt(factor);
        if (factor < 1.0 + 1e-6)
          break;
      }
    }
    if (!deviation)
      throw ConvergenceError(describe("solve_pure_tone: continuation stalled", Omega, F),
                             std::numeric_limits<double>::infinity());
    sol.continuation_steps = steps;
  }

  sol.deviation = *deviation;
  sol.X = passive + sol.deviation;
  sol.newton_iters = iterations;
  sol.residual_norm = pure_tone_residual(system, Omega, F, beta, sol.X).norm();
  sol.converged = sol.residual_norm <= options.tolerance * (1.0 + std::abs(F));
  if (!sol.converged)
    throw ConvergenceError(describe("solve_pure_tone: residual above tolerance", Omega, F),
                           sol.residual_norm);

  if (options.check_branches)
  {
    NewtonOptions probe = options;
    probe.check_branches = false;
    const complex rotation = std::polar(1.0, pi / 3.0);
    for (const complex s : {complex(1.8, 0.0), 0.4 * rotation})
    {
      int ignored = 0;
      auto other = try_pure_tone(system, Omega, F, beta, s * sol.X, probe, ignored);
      if (!other)
        continue;
      const CVector X = passive + *other;
      if (pure_tone_residual(system, Omega, F, beta, X).norm() >
          options.tolerance * (1.0 + std::abs(F)))
        continue;
      if ((X - sol.X).norm() > 1e-3 * std::max(sol.X.norm(), 1e-300))
        sol.multiple_branches = true;
    }
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Two-tone.

CubicCoefficients cubic_coefficients(complex S10, complex S01, complex S21, complex S12)
{
  const double a10 = std::norm(S10);
  const double a01 = std::norm(S01);
  const double a21 = std::norm(S21);
  const double a12 = std::norm(S12);
  CubicCoefficients c;
  c.c10 = S10 * a10 + 2.0 * S10 * (a01 + a21 + a12) + S01 * S01 * std::conj(S12) +
          2.0 * S01 * S21 * std::conj(S10) + 2.0 * S21 * S12 * std::conj(S01);
  c.c01 = S01 * a01 + 2.0 * S01 * (a10 + a21 + a12) + S10 * S10 * std::conj(S21) +
          2.0 * S10 * S12 * std::conj(S01) + 2.0 * S21 * S12 * std::conj(S10);
  c.c21 = S21 * a21 + 2.0 * S21 * (a10 + a01 + a12) + S10 * S10 * std::conj(S01) +
          2.0 * S10 * S01 * std::conj(S12);
  c.c12 = S12 * a12 + 2.0 * S12 * (a10 + a01 + a21) + S01 * S01 * std::conj(S10) +
          2.0 * S10 * S01 * std::conj(S21);
  return c;
}

std::array<double, 4> two_tone_frequencies(double Omega1, double Omega2)
{
  return {Omega1, Omega2, 2.0 * Omega1 - Omega2, -Omega1 + 2.0 * Omega2};
}

namespace
{

/// A cubic product coefficient * S_a S_b conj(S_c), tones indexed
/// 0 = (1,0), 1 = (0,1), 2 = (2,-1), 3 = (-1,2).
struct CubicTerm
{
  double coefficient;
  int a;
  int b;
  int c;
};

// The same expansions as cubic_coefficients, written as term lists for the
// tensor contraction and its Jacobian.
const std::array<std::vector<CubicTerm>, 4> &term_tables()
{
  static const std::array<std::vector<CubicTerm>, 4> tables = {{
    {{1, 0, 0, 0}, {2, 0, 1, 1}, {2, 0, 2, 2}, {2, 0, 3, 3}, {1, 1, 1, 3}, {2, 1, 2, 0},
     {2, 2, 3, 1}},
    {{1, 1, 1, 1}, {2, 1, 0, 0}, {2, 1, 2, 2}, {2, 1, 3, 3}, {1, 0, 0, 2}, {2, 0, 3, 1},
     {2, 2, 3, 0}},
    {{1, 2, 2, 2}, {2, 2, 0, 0}, {2, 2, 1, 1}, {2, 2, 3, 3}, {1, 0, 0, 1}, {2, 0, 1, 3}},
    {{1, 3, 3, 3}, {2, 3, 0, 0}, {2, 3, 1, 1}, {2, 3, 2, 2}, {1, 1, 1, 0}, {2, 0, 1, 2}},
  }};
  return tables;
}

void check_two_tone_inputs(const ModalSystem &system, const std::array<CVector, 4> &X)
{
  for (const auto &x : X)
    if (x.size() != static_cast<Eigen::Index>(system.size()))
      throw InvalidInput("two-tone amplitude vector has the wrong size");
}

std::array<CVector, 4> split(const CVector &z, Eigen::Index N)
{
  return {z.segment(0, N), z.segment(N, N), z.segment(2 * N, N), z.segment(3 * N, N)};
}

CVector join(const std::array<CVector, 4> &X)
{
  const Eigen::Index N = X[0].size();
  CVector z(4 * N);
  for (int p = 0; p < 4; ++p)
    z.segment(p * N, N) = X[p];
  return z;
}

std::array<CVector, 4> assemble_two_tone(const ModalSystem &system, double Omega1, double Omega2,
                                         double F1, double F2, double beta,
                                         const std::array<CVector, 4> &X,
                                         const std::array<CVector, 4> &coefficients)
{
  const auto w = two_tone_frequencies(Omega1, Omega2);
  const std::array<double, 4> forcing = {F1, F2, 0.0, 0.0};
  const CVector g = forcing_vector(system);
  const CMatrix Gt = system.gram_inverse.transpose();
  std::array<CVector, 4> out;
  for (int p = 0; p < 4; ++p)
    out[p] = detuning(system, w[p]).cwiseProduct(X[p]) + forcing[p] * g -
             I * beta * (Gt * coefficients[p]);
  return out;
}

}  // namespace

std::array<CVector, 4> two_tone_coefficients_quadrature(const ModalSystem &system, double Omega1,
                                                        double Omega2,
                                                        const std::array<CVector, 4> &X)
{
  check_two_tone_inputs(system, X);
  const auto w = two_tone_frequencies(Omega1, Omega2);
  const CMatrix &U = system.interior.values;
  const RVector &wt = system.interior.weights;
  std::array<CVector, 4> S;
  for (int p = 0; p < 4; ++p)
    S[p] = w[p] * (U * X[p]);
  std::array<CVector, 4> C;
  for (auto &c : C)
    c.resize(U.rows());
  for (Eigen::Index q = 0; q < U.rows(); ++q)
  {
    const auto c = cubic_coefficients(S[0][q], S[1][q], S[2][q], S[3][q]);
    C[0][q] = wt[q] * c.c10;
    C[1][q] = wt[q] * c.c01;
    C[2][q] = wt[q] * c.c21;
    C[3][q] = wt[q] * c.c12;
  }
  std::array<CVector, 4> out;
  for (int p = 0; p < 4; ++p)
    out[p] = U.adjoint() * C[p];  // sum_x C(x) conj(u_n(x)) w(x)
  return out;
}

std::array<CVector, 4> two_tone_coefficients_tensor(const ModalSystem &system, double Omega1,
                                                    double Omega2, const std::array<CVector, 4> &X)
{
  check_two_tone_inputs(system, X);
  const auto w = two_tone_frequencies(Omega1, Omega2);
  const auto &tables = term_tables();
  std::array<CVector, 4> out;
  for (int p = 0; p < 4; ++p)
  {
    out[p] = CVector::Zero(static_cast<Eigen::Index>(system.size()));
    for (const auto &t : tables[p])
      out[p] += (t.coefficient * w[t.a] * w[t.b] * w[t.c]) *
                contract(system.cubic, X[t.a], X[t.b], X[t.c]);
  }
  return out;
}

std::array<CVector, 4> two_tone_residual(const ModalSystem &system, double Omega1, double Omega2,
                                         double F1, double F2, double beta,
                                         const std::array<CVector, 4> &X)
{
  return assemble_two_tone(system, Omega1, Omega2, F1, F2, beta, X,
                           two_tone_coefficients_quadrature(system, Omega1, Omega2, X));
}

std::array<CVector, 4> two_tone_residual_tensor(const ModalSystem &system, double Omega1,
                                                double Omega2, double F1, double F2, double beta,
                                                const std::array<CVector, 4> &X)
{
  return assemble_two_tone(system, Omega1, Omega2, F1, F2, beta, X,
                           two_tone_coefficients_tensor(system, Omega1, Omega2, X));
}

namespace
{

NewtonProblem two_tone_problem(const ModalSystem &system, double Omega1, double Omega2, double F1,
                               double F2, double beta)
{
  const auto N = static_cast<Eigen::Index>(system.size());
  const auto w = two_tone_frequencies(Omega1, Omega2);
  const CMatrix Gt = system.gram_inverse.transpose();
  NewtonProblem p;
  p.scale = (std::abs(F1) + std::abs(F2)) * forcing_vector(system).norm();
  p.residual = [&system, Omega1, Omega2, F1, F2, beta, N](const CVector &z) {
    return join(two_tone_residual_tensor(system, Omega1, Omega2, F1, F2, beta, split(z, N)));
  };
  p.jacobian = [&system, w, Gt, beta, N](const CVector &z) -> std::pair<CMatrix, CMatrix> {
    const auto X = split(z, N);
    const auto &tables = term_tables();
    CMatrix J1 = CMatrix::Zero(4 * N, 4 * N);
    CMatrix J2 = CMatrix::Zero(4 * N, 4 * N);
    const complex c = -I * beta;
    for (int p = 0; p < 4; ++p)
    {
      J1.block(p * N, p * N, N, N).diagonal() += detuning(system, w[p]);
      for (const auto &t : tables[p])
      {
        const double f = t.coefficient * w[t.a] * w[t.b] * w[t.c];
        J1.block(p * N, t.a * N, N, N) += (c * f) * (Gt * derivative_first(system.cubic, X[t.b], X[t.c]));
        J1.block(p * N, t.b * N, N, N) += (c * f) * (Gt * derivative_first(system.cubic, X[t.a], X[t.c]));
        J2.block(p * N, t.c * N, N, N) +=
          (c * f) * (Gt * derivative_conjugate(system.cubic, X[t.a], X[t.b]));
      }
    }
    return {J1, J2};
  };
  return p;
}

}  // namespace

TwoToneSolution solve_two_tone(const ModalSystem &system, double Omega1, double Omega2, double F1,
                               double F2, double beta,
                               const std::optional<std::array<CVector, 4>> &start,
                               const TwoToneOptions &options)
{
  if (!std::isfinite(Omega1) || !std::isfinite(Omega2) || !std::isfinite(F1) ||
      !std::isfinite(F2) || !std::isfinite(beta))
    throw InvalidInput("solve_two_tone: non-finite input");
  const auto w = two_tone_frequencies(Omega1, Omega2);
  const double floor = options.min_separation * std::max(std::abs(Omega1), std::abs(Omega2));
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      if (std::abs(w[a] - w[b]) < floor)
        throw InvalidInput("solve_two_tone: output frequencies collide (Omega1 too close to Omega2)");

  const auto N = static_cast<Eigen::Index>(system.size());
  if (start)
    check_two_tone_inputs(system, *start);

  const auto initial = [&](double scale) {
    std::array<CVector, 4> X;
    X[0] = solve_pure_tone(system, Omega1, scale * F1, beta, std::nullopt, options.newton).X;
    X[1] = solve_pure_tone(system, Omega2, scale * F2, beta, std::nullopt, options.newton).X;
    X[2] = CVector::Zero(N);
    X[3] = CVector::Zero(N);
    return X;
  };

  TwoToneSolution sol;
  sol.Omega1 = Omega1;
  sol.Omega2 = Omega2;
  sol.F1 = F1;
  sol.F2 = F2;
  sol.beta = beta;

  int iterations = 0;
  const auto attempt = [&](double scale, const std::array<CVector, 4> &from)
    -> std::optional<CVector> {
    const auto problem = two_tone_problem(system, Omega1, Omega2, scale * F1, scale * F2, beta);
    const auto r = damped_newton(problem, join(from), options.newton);
    iterations += r.iterations;
    if (!r.converged)
      return std::nullopt;
    return r.z;
  };

  std::optional<CVector> z = attempt(1.0, start ? *start : initial(1.0));
  if (!z && start)
    z = attempt(1.0, initial(1.0));
  if (!z)
  {
    double scale = 1.0;
    std::optional<CVector> current;
    int steps = 0;
    while (steps < options.newton.max_continuation_steps)
    {
      scale *= 0.5;
      ++steps;
      current = attempt(scale, initial(scale));
      if (current)
        break;
    }
    if (!current)
      throw ConvergenceError("solve_two_tone: continuation found no start",
                             std::numeric_limits<double>::infinity());
    double factor = 2.0;
    while (scale < 1.0 && steps < options.newton.max_continuation_steps)
    {
      const double next = std::min(1.0, scale * factor);
      ++steps;
      auto a = attempt(next, split(*current, N));
      if (a)
      {
        current = a;
        scale = next;
        factor = std::min(2.0, factor * factor);
      }
      else
      {
        factor = std::sqrt(factor);
        if (factor < 1.0 + 1e-6)
          break;
      }
    }
    if (scale < 1.0)
      throw ConvergenceError("solve_two_tone: continuation stalled",
                             std::numeric_limits<double>::infinity());
    z = current;
    sol.continuation_steps = steps;
  }

  const auto X = split(*z, N);
  sol.X10 = X[0];
  sol.X01 = X[1];
  sol.X21 = X[2];
  sol.X12 = X[3];
  sol.newton_iters = iterations;
  sol.residual_norm = join(two_tone_residual(system, Omega1, Omega2, F1, F2, beta, X)).norm();
  sol.converged =
    sol.residual_norm <= options.newton.tolerance * (1.0 + std::abs(F1) + std::abs(F2));
  if (!sol.converged)
    throw ConvergenceError("solve_two_tone: residual above tolerance", sol.residual_norm);
  return sol;
}

// ---------------------------------------------------------------------------
// Single-oscillator oracle.

HopfOracleResult single_hopf_steady_state(double mu, double omega0, double Omega, double F,
                                          const HopfOracleOptions &options)
{
  if (!std::isfinite(mu) || !std::isfinite(omega0) || !std::isfinite(Omega) ||
      !std::isfinite(F) || F < 0.0)
    throw InvalidInput("single_hopf_steady_state: invalid parameters");
  using State = std::array<double, 2>;
  namespace ode = boost::numeric::odeint;

  const double detune = omega0 - Omega;
  const auto rhs = [=](const State &w, State &dw, double) {
    const double r2 = w[0] * w[0] + w[1] * w[1];
    // (mu + i detune) w - |w|^2 w + F
    dw[0] = (mu - r2) * w[0] - detune * w[1] + F;
    dw[1] = (mu - r2) * w[1] + detune * w[0];
  };

  State state = {F == 0.0 ? options.unforced_seed : 0.0, 0.0};
  auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<State>>(options.abs_tol,
                                                                     options.rel_tol);
  double t = 0.0;
  double horizon = options.initial_horizon;
  double drift = std::numeric_limits<double>::infinity();
  while (true)
  {
    const double window_start = 0.9 * horizon;
    if (t < window_start)
    {
      ode::integrate_adaptive(stepper, rhs, state, t, window_start,
                              std::min(1.0, window_start - t));
      t = window_start;
    }
    double lo = std::hypot(state[0], state[1]);
    double hi = lo;
    ode::integrate_adaptive(stepper, rhs, state, t, horizon, std::min(1.0, horizon - t),
                            [&](const State &w, double) {
                              const double a = std::hypot(w[0], w[1]);
                              lo = std::min(lo, a);
                              hi = std::max(hi, a);
                            });
    t = horizon;
    const double amplitude = std::hypot(state[0], state[1]);
    drift = (hi - lo) / std::max(amplitude, 1e-12);
    // Below the integrator's absolute tolerance the amplitude is not
    // resolved; the trajectory has collapsed onto the origin.
    const bool collapsed = hi <= 100.0 * options.abs_tol;
    if (drift < options.drift_tolerance || collapsed)
    {
      HopfOracleResult r;
      r.mu = mu;
      r.omega0 = omega0;
      r.Omega = Omega;
      r.F = F;
      r.steady_amplitude = amplitude;
      r.horizon = horizon;
      r.drift = drift;
      return r;
    }
    if (horizon >= options.max_horizon)
      throw ConvergenceError("single_hopf_steady_state: amplitude still drifting at the horizon cap",
                             drift);
    horizon = std::min(options.max_horizon, 2.0 * horizon);
  }
}

RMatrix pure_tone_jacobian(const ModalSystem &system, double Omega, double F, double beta,
                           const CVector &X)
{
  const CVector passive = solve_passive(system, Omega, F);
  const auto problem = pure_tone_problem(system, Omega, F, beta, passive);
  const auto [J1, J2] = problem.jacobian(X - passive);
  return realify(J1, J2);
}

RMatrix two_tone_jacobian(const ModalSystem &system, double Omega1, double Omega2, double beta,
                          const std::array<CVector, 4> &X)
{
  const auto problem = two_tone_problem(system, Omega1, Omega2, 0.0, 0.0, beta);
  const auto [J1, J2] = problem.jacobian(join(X));
  return realify(J1, J2);
}

}  // namespace cochlea::hopf
