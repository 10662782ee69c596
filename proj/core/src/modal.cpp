// SPDX-License-Identifier: Apache-2.0
#include "cochlea/modal.hpp"

#include "cochlea/parallel.hpp"
#include "cochlea/quadrature.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <openssl/evp.h>

#include <cmath>
#include <iomanip>
#include <sstream>

namespace cochlea::modal
{

namespace
{

constexpr int cache_format_version = 1;

struct BoundaryData
{
  std::vector<double> weights;  // signed: outward normal of Q \ D
  CMatrix value;                // nodes x modes
  CMatrix normal_derivative;    // along the outward normal of the curve
};

// Values and normal derivatives of every mode's exterior field on the
// boundary of Q \ D. Circle normals point out of the disks, i.e. into
// Q \ D, so their weights enter with a minus sign.
BoundaryData exterior_boundary(const std::vector<spectral::Eigenmode> &modes,
                               const geometry::ResonatorArray &array, const QuadratureSpec &quad,
                               unsigned threads)
{
  std::vector<Vec2> nodes;
  std::vector<Vec2> normals;
  BoundaryData data;
  const auto box = quadrature::rectangle_boundary_rule(quad.lo, quad.hi, quad.panel_length,
                                                       quad.panel_order);
  for (std::size_t k = 0; k < box.size(); ++k)
  {
    nodes.push_back(box.nodes[k]);
    normals.push_back(box.normals[k]);
    data.weights.push_back(box.weights[k]);
  }
  for (const auto &r : array.resonators)
  {
    const auto c = quadrature::circle_rule(r.center, r.radius, quad.circle_points);
    for (std::size_t k = 0; k < c.size(); ++k)
    {
      nodes.push_back(c.nodes[k]);
      normals.push_back(c.normals[k]);
      data.weights.push_back(-c.weights[k]);
    }
  }
  const auto P = static_cast<Eigen::Index>(nodes.size());
  const auto N = static_cast<Eigen::Index>(modes.size());
  data.value.resize(P, N);
  data.normal_derivative.resize(P, N);
  parallel_for(nodes.size(), threads, [&](std::size_t p) {
    const auto row = static_cast<Eigen::Index>(p);
    for (Eigen::Index n = 0; n < N; ++n)
    {
      const auto g =
        modes[static_cast<std::size_t>(n)].field.value_and_gradient(nodes[p], bie::Side::exterior);
      data.value(row, n) = g.value;
      data.normal_derivative(row, n) = g.dx * normals[p].x() + g.dy * normals[p].y();
    }
  });
  return data;
}

nlohmann::json complex_json(complex z)
{
  return nlohmann::json::array({z.real(), z.imag()});
}

complex json_complex(const nlohmann::json &j)
{
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

nlohmann::json vector_json(const CVector &v)
{
  auto out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.push_back(complex_json(v(i)));
  return out;
}

CVector json_vector(const nlohmann::json &j)
{
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = json_complex(j[i]);
  return v;
}

nlohmann::json matrix_json(const CMatrix &m)
{
  auto out = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    out.push_back(vector_json(m.row(r).transpose()));
  return out;
}

CMatrix json_matrix(const nlohmann::json &j)
{
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    m.row(r) = json_vector(j[static_cast<std::size_t>(r)]).transpose();
  return m;
}

CMatrix hermitian_inverse(const CMatrix &G)
{
  Eigen::LLT<CMatrix> llt(G);
  if (llt.info() != Eigen::Success)
    throw ConvergenceError("Gram matrix is not positive definite", 0.0);
  CMatrix inv = llt.solve(CMatrix::Identity(G.rows(), G.cols()));
  return 0.5 * (inv + inv.adjoint().eval());
}

}  // namespace

CMatrix invert_gram(const CMatrix &gram)
{
  return hermitian_inverse(gram);
}

QuadratureSpec QuadratureSpec::for_array(const geometry::ResonatorArray &array, double inflation)
{
  if (array.resonators.empty())
    throw InvalidInput("array has no resonators");
  if (!(inflation > 0.0))
    throw InvalidInput("Q inflation must be positive");
  Vec2 lo = array.source;
  Vec2 hi = array.source;
  for (const auto &r : array.resonators)
  {
    lo = lo.cwiseMin(r.center - Vec2::Constant(r.radius));
    hi = hi.cwiseMax(r.center + Vec2::Constant(r.radius));
  }
  const double margin = inflation * (hi - lo).norm();
  QuadratureSpec q;
  q.inflation = inflation;
  q.lo = lo - Vec2::Constant(margin);
  q.hi = hi + Vec2::Constant(margin);
  return q;
}

QuadratureSpec QuadratureSpec::doubled() const
{
  QuadratureSpec q = *this;
  q.radial *= 2;
  q.angular *= 2;
  q.circle_points *= 2;
  q.panel_order *= 2;
  return q;
}

void QuadratureSpec::validate(const geometry::ResonatorArray &array) const
{
  if (radial < 4 || angular < 8 || circle_points < 16 || panel_order < 4 || !(panel_length > 0.0))
    throw InvalidInput("quadrature node counts below the minima (radial 4, angular 8, circle 16, "
                       "panel order 4)");
  auto inside = [&](const Vec2 &p, double pad) {
    return p.x() - pad > lo.x() && p.x() + pad < hi.x() && p.y() - pad > lo.y() &&
           p.y() + pad < hi.y();
  };
  if (!inside(array.source, 0.0))
    throw InvalidInput("box Q does not contain the source");
  for (const auto &r : array.resonators)
    if (!inside(r.center, r.radius))
      throw InvalidInput("box Q does not strictly contain every resonator");
}

InteriorSamples sample_interior(const std::vector<spectral::Eigenmode> &modes,
                                const geometry::ResonatorArray &array,
                                const QuadratureSpec &quad, unsigned threads)
{
  InteriorSamples s;
  std::vector<double> w;
  for (const auto &r : array.resonators)
  {
    const auto rule = quadrature::disk_rule(r.center, r.radius, quad.radial, quad.angular);
    s.nodes.insert(s.nodes.end(), rule.nodes.begin(), rule.nodes.end());
    w.insert(w.end(), rule.weights.begin(), rule.weights.end());
  }
  s.weights = Eigen::Map<const RVector>(w.data(), static_cast<Eigen::Index>(w.size()));
  s.values.resize(static_cast<Eigen::Index>(s.nodes.size()),
                  static_cast<Eigen::Index>(modes.size()));
  parallel_for(s.nodes.size(), threads, [&](std::size_t p) {
    for (std::size_t n = 0; n < modes.size(); ++n)
      s.values(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(n)) =
        modes[n].field.value(s.nodes[p], bie::Side::interior);
  });
  return s;
}

CMatrix raw_gram_matrix(const std::vector<spectral::Eigenmode> &modes,
                        const geometry::ResonatorArray &array, const bie::WaveParams &params,
                        const QuadratureSpec &quad, unsigned threads)
{
  quad.validate(array);
  const auto N = static_cast<Eigen::Index>(modes.size());
  const auto interior = sample_interior(modes, array, quad, threads);
  const auto boundary = exterior_boundary(modes, array, quad, threads);

  // Interior part: direct polar quadrature.
  const CMatrix weighted = interior.weights.asDiagonal() * interior.values;
  CMatrix G = interior.values.transpose() * weighted.conjugate();

  // Exterior part via Green's second identity on Q \ D:
  //   (k_i^2 - conj(k_j)^2) int u_i conj(u_j) = oint (u_i d_n conj(u_j) - conj(u_j) d_n u_i).
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j)
    {
      const complex ki = params.k_exterior(modes[static_cast<std::size_t>(i)].resonance.omega);
      const complex kj = params.k_exterior(modes[static_cast<std::size_t>(j)].resonance.omega);
      const complex denom = ki * ki - std::conj(kj) * std::conj(kj);
      if (std::abs(denom) <= 1e-300)
        throw ConvergenceError("Green-identity reduction needs non-real resonances", 0.0);
      complex flux = 0.0;
      for (std::size_t p = 0; p < boundary.weights.size(); ++p)
      {
        const auto row = static_cast<Eigen::Index>(p);
        const complex ui = boundary.value(row, i);
        const complex duj = std::conj(boundary.normal_derivative(row, j));
        const complex uj = std::conj(boundary.value(row, j));
        const complex dui = boundary.normal_derivative(row, i);
        flux += boundary.weights[p] * (ui * duj - uj * dui);
      }
      G(i, j) += flux / denom;
    }
  return G;
}

CMatrix gram_matrix(const std::vector<spectral::Eigenmode> &modes,
                    const geometry::ResonatorArray &array, const bie::WaveParams &params,
                    const QuadratureSpec &quad, unsigned threads)
{
  const CMatrix G = raw_gram_matrix(modes, array, params, quad, threads);
  const CMatrix herm = 0.5 * (G + G.adjoint().eval());
  Eigen::LLT<CMatrix> llt(herm);
  if (llt.info() != Eigen::Success)
    throw ConvergenceError("Gram matrix is not positive definite", 0.0);
  return herm;
}

GramDiagnostics diagnose_gram(const CMatrix &raw)
{
  GramDiagnostics d;
  d.hermitian_defect = (raw - raw.adjoint()).norm() / raw.norm();
  const CMatrix herm = 0.5 * (raw + raw.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = eig.eigenvalues().minCoeff();
  if (d.min_eigenvalue > 0.0)
  {
    const CMatrix inv = hermitian_inverse(herm);
    d.inverse_defect = (herm * inv - CMatrix::Identity(herm.rows(), herm.cols())).norm();
  }
  else
  {
    d.inverse_defect = std::numeric_limits<double>::infinity();
  }
  return d;
}

CVector source_coupling(const std::vector<spectral::Eigenmode> &modes, const Vec2 &source)
{
  CVector out(static_cast<Eigen::Index>(modes.size()));
  for (std::size_t n = 0; n < modes.size(); ++n)
  {
    const auto &field = modes[n].field;
    if (geometry::containing_resonator(field.array(), source) >= 0)
      throw InvalidInput("source lies inside a resonator");
    // automatic side selection rejects points on a boundary
    out(static_cast<Eigen::Index>(n)) = std::conj(field.value(source, bie::Side::automatic));
  }
  return out;
}

CubicTensor cubic_tensor(const InteriorSamples &samples, unsigned threads)
{
  const auto N = static_cast<std::size_t>(samples.values.cols());
  CubicTensor T(N);
  const CMatrix &U = samples.values;
  const CMatrix Ubar = U.conjugate();
  // One task per (n, i): fills j >= i for all k and mirrors to (j, i).
  parallel_for(N * N, threads, [&](std::size_t task) {
    const std::size_t n = task / N;
    const std::size_t i = task % N;
    const auto ni = static_cast<Eigen::Index>(n);
    const auto ii = static_cast<Eigen::Index>(i);
    const CVector base = samples.weights.cast<complex>().cwiseProduct(U.col(ii)).cwiseProduct(
      Ubar.col(ni));
    for (std::size_t j = i; j < N; ++j)
    {
      const CVector bj = base.cwiseProduct(U.col(static_cast<Eigen::Index>(j)));
      for (std::size_t k = 0; k < N; ++k)
      {
        const complex value = U.col(static_cast<Eigen::Index>(k)).dot(bj);  // conj(u_k)
        T(n, i, j, k) = value;
      }
    }
  });
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < i; ++j)
        for (std::size_t k = 0; k < N; ++k)
          T(n, i, j, k) = T(n, j, i, k);
  return T;
}

CubicTensor cubic_tensor(const std::vector<spectral::Eigenmode> &modes,
                         const geometry::ResonatorArray &array, const QuadratureSpec &quad,
                         unsigned threads)
{
  return cubic_tensor(sample_interior(modes, array, quad, threads), threads);
}

complex ModalSystem::field(const CVector &X, const Vec2 &x) const
{
  complex out = 0.0;
  for (std::size_t n = 0; n < modes.size(); ++n)
    out += X(static_cast<Eigen::Index>(n)) * modes[n].field.value(x);
  return out;
}

ModalSystem build_modal_system(const geometry::ResonatorArray &array,
                               const bie::WaveParams &params,
                               std::vector<spectral::Eigenmode> modes, const QuadratureSpec &quad,
                               unsigned threads)
{
  ModalSystem s;
  s.array = array;
  s.params = params;
  s.quad = quad;
  s.omegas.resize(static_cast<Eigen::Index>(modes.size()));
  for (std::size_t n = 0; n < modes.size(); ++n)
    s.omegas(static_cast<Eigen::Index>(n)) = modes[n].resonance.omega;
  s.gram = gram_matrix(modes, array, params, quad, threads);
  s.gram_inverse = hermitian_inverse(s.gram);
  s.source_vec = source_coupling(modes, array.source);
  s.interior = sample_interior(modes, array, quad, threads);
  s.cubic = cubic_tensor(s.interior, threads);
  s.modes = std::move(modes);
  return s;
}

std::string sha256_hex(const std::string &text)
{
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 computation failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i)
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return out.str();
}

nlohmann::json to_json(const ModalSystem &s)
{
  nlohmann::json j;
  j["format_version"] = cache_format_version;
  auto resonators = nlohmann::json::array();
  for (const auto &r : s.array.resonators)
    resonators.push_back({{"center", {r.center.x(), r.center.y()}}, {"radius", r.radius}});
  j["array"] = {{"resonators", resonators},
                {"source", {s.array.source.x(), s.array.source.y()}},
                {"grading_factor", s.array.grading_factor}};
  j["params"] = {{"v", s.params.v}, {"v_b", s.params.v_b}, {"delta", s.params.delta},
                 {"tau", s.params.tau}};
  j["quad"] = {{"lo", {s.quad.lo.x(), s.quad.lo.y()}},
               {"hi", {s.quad.hi.x(), s.quad.hi.y()}},
               {"inflation", s.quad.inflation},
               {"radial", s.quad.radial},
               {"angular", s.quad.angular},
               {"circle_points", s.quad.circle_points},
               {"panel_length", s.quad.panel_length},
               {"panel_order", s.quad.panel_order}};
  auto modes = nlohmann::json::array();
  for (const auto &m : s.modes)
  {
    auto psi = nlohmann::json::array();
    auto phi = nlohmann::json::array();
    for (std::size_t r = 0; r < m.density.psi.size(); ++r)
    {
      psi.push_back(vector_json(m.density.psi[r]));
      phi.push_back(vector_json(m.density.phi[r]));
    }
    modes.push_back({{"omega", complex_json(m.resonance.omega)},
                     {"residual", m.resonance.residual},
                     {"M", m.resonance.M},
                     {"refinement_drift", m.resonance.refinement_drift},
                     {"normalization", complex_json(m.normalization)},
                     {"psi", psi},
                     {"phi", phi}});
  }
  j["modes"] = modes;
  j["gram"] = matrix_json(s.gram);
  j["source_vec"] = vector_json(s.source_vec);
  auto cubic = nlohmann::json::array();
  for (complex z : s.cubic.data())
    cubic.push_back(complex_json(z));
  j["cubic"] = cubic;
  return j;
}

ModalSystem from_json(const nlohmann::json &j, unsigned threads)
{
  if (j.at("format_version").get<int>() != cache_format_version)
    throw InvalidInput("unsupported modal cache format");
  ModalSystem s;
  for (const auto &r : j.at("array").at("resonators"))
    s.array.resonators.push_back(
      {Vec2(r.at("center").at(0).get<double>(), r.at("center").at(1).get<double>()),
       r.at("radius").get<double>()});
  s.array.source = Vec2(j["array"]["source"][0].get<double>(), j["array"]["source"][1].get<double>());
  s.array.grading_factor = j["array"]["grading_factor"].get<double>();
  const auto &p = j.at("params");
  s.params.v = p.at("v").get<double>();
  s.params.v_b = p.at("v_b").get<double>();
  s.params.delta = p.at("delta").get<double>();
  s.params.tau = p.at("tau").get<double>();
  s.params.validate();
  const auto &q = j.at("quad");
  s.quad.lo = Vec2(q["lo"][0].get<double>(), q["lo"][1].get<double>());
  s.quad.hi = Vec2(q["hi"][0].get<double>(), q["hi"][1].get<double>());
  s.quad.inflation = q.at("inflation").get<double>();
  s.quad.radial = q.at("radial").get<int>();
  s.quad.angular = q.at("angular").get<int>();
  s.quad.circle_points = q.at("circle_points").get<int>();
  s.quad.panel_length = q.at("panel_length").get<double>();
  s.quad.panel_order = q.at("panel_order").get<int>();

  const auto &modes = j.at("modes");
  s.omegas.resize(static_cast<Eigen::Index>(modes.size()));
  for (std::size_t n = 0; n < modes.size(); ++n)
  {
    const auto &m = modes[n];
    spectral::Resonance res{json_complex(m.at("omega")), m.at("residual").get<double>(),
                            m.at("M").get<int>(), m.at("refinement_drift").get<double>()};
    auto density = bie::MultipoleDensity::zero(s.array.size(), res.M);
    for (std::size_t r = 0; r < s.array.size(); ++r)
    {
      density.psi[r] = json_vector(m.at("psi").at(r));
      density.phi[r] = json_vector(m.at("phi").at(r));
    }
    const complex c = json_complex(m.at("normalization"));
    bie::FieldEvaluator field(s.array, s.params, res.omega, density);
    field.scale(c);
    s.omegas(static_cast<Eigen::Index>(n)) = res.omega;
    s.modes.push_back(spectral::Eigenmode{res, std::move(density), c, std::move(field)});
  }
  s.gram = json_matrix(j.at("gram"));
  s.gram_inverse = hermitian_inverse(s.gram);
  s.source_vec = json_vector(j.at("source_vec"));
  const auto N = s.modes.size();
  s.cubic = CubicTensor(N);
  const auto &cubic = j.at("cubic");
  if (cubic.size() != N * N * N * N)
    throw InvalidInput("cubic tensor in cache has the wrong size");
  for (std::size_t i = 0; i < cubic.size(); ++i)
    s.cubic.data()[i] = json_complex(cubic[i]);
  s.interior = sample_interior(s.modes, s.array, s.quad, threads);
  return s;
}

}  // namespace cochlea::modal
