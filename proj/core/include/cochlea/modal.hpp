// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cochlea/boundary_integral.hpp"
#include "cochlea/geometry.hpp"
#include "cochlea/spectral.hpp"
#include "cochlea/types.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

/// Projection of the wave problem onto the eigenmode basis: Gram matrix
/// over a box Q, coupling to a point source, and the cubic tensor over D.
namespace cochlea::modal
{

struct QuadratureSpec
{
  /// Box Q = [lo, hi].
  Vec2 lo = Vec2::Zero();
  Vec2 hi = Vec2::Zero();
  /// Inflation used to build Q (fraction of the bounding-box diagonal).
  double inflation = 0.5;
  /// Interior polar rule per disk.
  int radial = 24;
  int angular = 48;
  /// Exterior: boundary rules for the Green-identity reduction.
  int circle_points = 128;
  double panel_length = 1.0;
  int panel_order = 16;

  /// Q = bounding box of D and the source, inflated on every side by
  /// `inflation` times its diagonal.
  static QuadratureSpec for_array(const geometry::ResonatorArray &array, double inflation = 0.5);

  /// Same box with every node count doubled.
  QuadratureSpec doubled() const;

  /// Throws InvalidInput if Q does not strictly contain D and the source or
  /// node counts are below the minima.
  void validate(const geometry::ResonatorArray &array) const;
};

/// Normalised eigenmodes sampled at the interior quadrature nodes.
struct InteriorSamples
{
  std::vector<Vec2> nodes;
  RVector weights;
  CMatrix values;  // nodes x modes
};

InteriorSamples sample_interior(const std::vector<spectral::Eigenmode> &modes,
                                const geometry::ResonatorArray &array,
                                const QuadratureSpec &quad, unsigned threads = 0);

/// gamma_ij = (u_i, u_j)_Q before Hermitian averaging.
CMatrix raw_gram_matrix(const std::vector<spectral::Eigenmode> &modes,
                        const geometry::ResonatorArray &array, const bie::WaveParams &params,
                        const QuadratureSpec &quad, unsigned threads = 0);

/// gamma_ij = (u_i, u_j)_Q = int_Q u_i conj(u_j), Hermitianised. Throws
/// ConvergenceError if the result is not positive definite.
CMatrix gram_matrix(const std::vector<spectral::Eigenmode> &modes,
                    const geometry::ResonatorArray &array, const bie::WaveParams &params,
                    const QuadratureSpec &quad, unsigned threads = 0);

/// Hermitian inverse of a positive-definite Gram matrix via Cholesky.
/// Throws ConvergenceError if the matrix is not positive definite.
CMatrix invert_gram(const CMatrix &gram);

/// Entry n is conj(u_n(source)). Throws InvalidInput for a source on or
/// inside a resonator.
CVector source_coupling(const std::vector<spectral::Eigenmode> &modes, const Vec2 &source);

/// Dense N^4 tensor with T[n][i][j][k] = int_D u_i u_j conj(u_k) conj(u_n).
class CubicTensor
{
public:
  CubicTensor() = default;
  explicit CubicTensor(std::size_t n) : n_(n), data_(n * n * n * n, complex(0.0)) {}

  std::size_t size() const { return n_; }
  complex operator()(std::size_t n, std::size_t i, std::size_t j, std::size_t k) const
  {
    return data_[((n * n_ + i) * n_ + j) * n_ + k];
  }
  complex &operator()(std::size_t n, std::size_t i, std::size_t j, std::size_t k)
  {
    return data_[((n * n_ + i) * n_ + j) * n_ + k];
  }
  const std::vector<complex> &data() const { return data_; }
  std::vector<complex> &data() { return data_; }

private:
  std::size_t n_ = 0;
  std::vector<complex> data_;
};

/// Cubic tensor from interior samples, symmetric in (i, j) by construction.
CubicTensor cubic_tensor(const InteriorSamples &samples, unsigned threads = 0);

CubicTensor cubic_tensor(const std::vector<spectral::Eigenmode> &modes,
                         const geometry::ResonatorArray &array, const QuadratureSpec &quad,
                         unsigned threads = 0);

struct ModalSystem
{
  geometry::ResonatorArray array;
  bie::WaveParams params;
  QuadratureSpec quad;
  std::vector<spectral::Eigenmode> modes;
  CVector omegas;
  CMatrix gram;
  CMatrix gram_inverse;
  CVector source_vec;
  CubicTensor cubic;
  InteriorSamples interior;

  std::size_t size() const { return static_cast<std::size_t>(omegas.size()); }

  /// sum_n u_n(x) X_n, the pressure amplitude at x.
  complex field(const CVector &X, const Vec2 &x) const;
};

ModalSystem build_modal_system(const geometry::ResonatorArray &array,
                               const bie::WaveParams &params,
                               std::vector<spectral::Eigenmode> modes, const QuadratureSpec &quad,
                               unsigned threads = 0);

/// Hermitian part check, Cholesky-based inverse and identity residual.
struct GramDiagnostics
{
  double hermitian_defect = 0.0;  // ||G - G^H|| / ||G|| before symmetrisation
  double min_eigenvalue = 0.0;
  double inverse_defect = 0.0;  // ||G G^{-1} - I||
};
GramDiagnostics diagnose_gram(const CMatrix &raw_gram);

// ---------------------------------------------------------------------------
// Cache.

/// Lower-case hex SHA-256 of a string.
std::string sha256_hex(const std::string &text);

/// Cache file content: enough to rebuild the system bit-for-bit.
nlohmann::json to_json(const ModalSystem &system);

/// Rebuilds a system from to_json output (modes, interior samples and the
/// inverse Gram matrix are recomputed deterministically).
ModalSystem from_json(const nlohmann::json &j, unsigned threads = 0);

}  // namespace cochlea::modal
