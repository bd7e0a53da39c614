#include "srpca/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "srpca/rng.hpp"

namespace srpca {

Matrix init_estimate(const ObservedMatrix& x_std, std::uint64_t seed) {
  x_std.validate();
  Rng rng(seed);
  Matrix m0(x_std.rows(), x_std.cols());
  for (Index j = 0; j < x_std.cols(); ++j)
    for (Index i = 0; i < x_std.rows(); ++i)
      m0(i, j) = x_std.mask(i, j) ? x_std.values(i, j) : rng.normal();
  return m0;
}

Matrix project_components(const Matrix& m, const Matrix& loadings) {
  if (m.cols() != loadings.cols())
    throw std::invalid_argument("project_components: dimension mismatch");
  return m * loadings.transpose();
}

namespace detail {

void fix_sign(Eigen::Ref<Vector> v) {
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0) return;
  const double cutoff = 1e-12 * scale;
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) <= cutoff) continue;
    if (v(i) < 0) v = -v;
    return;
  }
}

SpectralBasis dense_top_eig(const Matrix& m0, Index r) {
  const Index n = m0.cols();
  const Matrix gram = m0.transpose() * m0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("dense_top_eig: eigendecomposition failed");

  SpectralBasis basis;
  basis.loadings.resize(r, n);
  basis.eigenvalues.resize(r);
  for (Index k = 0; k < r; ++k) {
    // Eigen sorts ascending; walk from the back for descending order.
    const Index src = n - 1 - k;
    basis.eigenvalues(k) = std::max(0.0, solver.eigenvalues()(src));
    Vector v = solver.eigenvectors().col(src);
    fix_sign(v);
    basis.loadings.row(k) = v.transpose();
  }
  return basis;
}

SpectralBasis subspace_top_eig(const Matrix& m0, Index r) {
  const Index n = m0.cols();
  const Index block = std::min(n, r + Index{6});
  constexpr int kMaxSweeps = 500;
  constexpr double kResidualTol = 1e-10;

  // Deterministic start: the seed is part of the algorithm, not the caller's
  // stream, so repeated factorizations of the same matrix agree bit for bit.
  Rng rng(0x5eedb10c);
  Matrix v(n, block);
  for (Index j = 0; j < block; ++j)
    for (Index i = 0; i < n; ++i) v(i, j) = rng.normal();
  v = Eigen::HouseholderQR<Matrix>(v).householderQ() *
      Matrix::Identity(n, block);

  Vector ritz = Vector::Zero(block);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const Matrix gv = m0.transpose() * (m0 * v);
    // Rayleigh-Ritz on the current block, rotated so columns are eigenvector
    // estimates in descending eigenvalue order.
    const Matrix small = v.transpose() * gv;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(small);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("subspace_top_eig: projected solve failed");
    Matrix rotation(block, block);
    for (Index k = 0; k < block; ++k) {
      rotation.col(k) = solver.eigenvectors().col(block - 1 - k);
      ritz(k) = solver.eigenvalues()(block - 1 - k);
    }
    const Matrix rotated = v * rotation;
    const Matrix rotated_gv = gv * rotation;

    const double scale = std::max(1.0, std::abs(ritz(0)));
    double worst = 0;
    for (Index k = 0; k < r; ++k) {
      const double res = (rotated_gv.col(k) - ritz(k) * rotated.col(k)).norm();
      worst = std::max(worst, res);
    }
    if (worst <= kResidualTol * scale) {
      v = rotated;
      break;
    }
    v = Eigen::HouseholderQR<Matrix>(rotated_gv).householderQ() *
        Matrix::Identity(n, block);
  }

  SpectralBasis basis;
  basis.loadings.resize(r, n);
  basis.eigenvalues.resize(r);
  for (Index k = 0; k < r; ++k) {
    basis.eigenvalues(k) = std::max(0.0, ritz(k));
    Vector col = v.col(k);
    fix_sign(col);
    basis.loadings.row(k) = col.transpose();
  }
  return basis;
}

}  // namespace detail

SpectralBasis top_r_eig(const Matrix& m0, Index r) {
  if (m0.rows() < 1 || m0.cols() < 1)
    throw std::invalid_argument("top_r_eig: empty matrix");
  if (r < 1 || r > m0.cols())
    throw std::invalid_argument("top_r_eig: rank out of range");
  if (!m0.allFinite())
    throw std::invalid_argument("top_r_eig: non-finite input");

  // A wide Gram factor caps the usable rank at the row count.
  const Index r_eff = std::min(r, m0.rows());
  SpectralBasis basis = m0.cols() <= 1024 ? detail::dense_top_eig(m0, r_eff)
                                          : detail::subspace_top_eig(m0, r_eff);
  basis.rank_clamped = r_eff < r;
  return basis;
}

}  // namespace srpca
