#ifndef SRPCA_SPECTRAL_HPP
#define SRPCA_SPECTRAL_HPP

#include "srpca/types.hpp"

namespace srpca {

// First approximation: observed cells copy x, unobserved cells are i.i.d.
// standard-normal draws. Cells are filled in column-major order from the
// seeded stream, so the result is bit-reproducible.
Matrix init_estimate(const ObservedMatrix& x_std, std::uint64_t seed);

struct SpectralBasis {
  Matrix loadings;     // r x n, rows are eigenvectors of the Gram matrix
  Vector eigenvalues;  // length r, descending, nonnegative
  bool rank_clamped = false;
};

// Top-r eigenpairs of the Gram matrix m0^T m0. Rows of `loadings` are
// orthonormal; signs are fixed so the first nonzero coordinate of each
// eigenvector is nonnegative. r is clamped to min(rows, cols) when the Gram
// matrix cannot support it (rank_clamped reports this). Uses a full dense
// eigendecomposition for n <= 1024 and subspace iteration above that.
SpectralBasis top_r_eig(const Matrix& m0, Index r);

// P = M * U^T, the projection of the estimate onto the loading basis.
Matrix project_components(const Matrix& m, const Matrix& loadings);

namespace detail {
// Both strategies behind top_r_eig, callable directly so they can be
// cross-checked against each other on the same input.
SpectralBasis dense_top_eig(const Matrix& m0, Index r);
SpectralBasis subspace_top_eig(const Matrix& m0, Index r);
// In-place sign convention used for every returned eigenvector.
void fix_sign(Eigen::Ref<Vector> v);
}  // namespace detail

}  // namespace srpca

#endif
