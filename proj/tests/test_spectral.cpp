#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "srpca/observation.hpp"
#include "srpca/spectral.hpp"

using namespace srpca;

TEST_CASE("init_estimate copies a fully observed matrix") {
  const Matrix values = oracle::random_matrix(5, 3, 2);
  const Matrix m0 = init_estimate(ObservedMatrix::dense(values), 9);
  CHECK((m0.array() == values.array()).all());
}

TEST_CASE("init_estimate is bit-identical across repeat calls") {
  ObservedMatrix x;
  x.values = Matrix::Zero(3, 3);
  x.mask = Mask::Constant(3, 3, false);
  x.mask(0, 0) = true;  // keep one observation so the matrix is valid
  const Matrix a = init_estimate(x, 1);
  const Matrix b = init_estimate(x, 1);
  CHECK((a.array() == b.array()).all());
  CHECK_FALSE((init_estimate(x, 2).array() == a.array()).all());
}

TEST_CASE("init_estimate unobserved cells follow the seeded normal stream") {
  ObservedMatrix x;
  x.values = oracle::random_matrix(4, 4, 77);
  x.mask = random_mask(4, 4, 0.5, 31);
  const Matrix m0 = init_estimate(x, 5);

  // The stream visits unobserved cells in column-major order.
  oracle::RefStream stream(5);
  for (Index j = 0; j < 4; ++j)
    for (Index i = 0; i < 4; ++i) {
      if (x.mask(i, j)) {
        CHECK(m0(i, j) == x.values(i, j));
      } else {
        CHECK(m0(i, j) == stream.normal());
      }
    }
}

TEST_CASE("top_r_eig on the identity yields unit eigenvalues") {
  const SpectralBasis basis = top_r_eig(Matrix::Identity(3, 3), 2);
  REQUIRE(basis.eigenvalues.size() == 2);
  CHECK(basis.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(basis.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-12));
  const Matrix gram = basis.loadings * basis.loadings.transpose();
  CHECK((gram - Matrix::Identity(2, 2)).norm() < 1e-8);
}

TEST_CASE("top_r_eig resolves a rank-1 outer product analytically") {
  Vector u(5);
  u << 1, 1, 1, 1, 1;  // norm sqrt(5)
  Vector v(2);
  v << 1, 1;  // norm sqrt(2)
  const Matrix m0 = u * v.transpose();
  const SpectralBasis basis = top_r_eig(m0, 1);
  CHECK(basis.eigenvalues(0) == doctest::Approx(10.0).epsilon(1e-12));
  const Vector expected = v / v.norm();
  CHECK((basis.loadings.row(0).transpose() - expected).norm() < 1e-12);
}

TEST_CASE("top_r_eig matches the Jacobi oracle on a random matrix") {
  const Matrix m0 = oracle::random_matrix(6, 4, 13);
  const SpectralBasis basis = top_r_eig(m0, 3);

  const oracle::EigResult ref =
      oracle::jacobi_eig(oracle::naive_matmul(m0.transpose(), m0));
  for (Index k = 0; k < 3; ++k) {
    CHECK(std::abs(basis.eigenvalues(k) - ref.values(k)) <=
          1e-8 * std::max(1.0, ref.values(k)));
    Vector ref_vec = ref.vectors.col(k);
    detail::fix_sign(ref_vec);
    CHECK((basis.loadings.row(k).transpose() - ref_vec).norm() < 1e-8);
  }
}

TEST_CASE("top_r_eig validates rank and input") {
  const Matrix m0 = Matrix::Identity(4, 4);
  CHECK_THROWS_AS(top_r_eig(m0, 0), std::invalid_argument);
  CHECK_THROWS_AS(top_r_eig(m0, 5), std::invalid_argument);
  Matrix bad = m0;
  bad(1, 1) = std::nan("");
  CHECK_THROWS_AS(top_r_eig(bad, 2), std::invalid_argument);
}

TEST_CASE("top_r_eig clamps rank to the row count of a wide matrix") {
  // 2x4 input: the Gram matrix has rank at most 2, so r=3 is clamped.
  const Matrix m0 = oracle::random_matrix(2, 4, 3);
  const SpectralBasis basis = top_r_eig(m0, 3);
  CHECK(basis.rank_clamped);
  CHECK(basis.loadings.rows() == 2);
  CHECK(basis.eigenvalues.size() == 2);
}

TEST_CASE("top_r_eig applies the nonnegative-leading-coordinate sign rule") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix m0 = oracle::random_matrix(5, 5, 100 + seed);
    const SpectralBasis basis = top_r_eig(m0, 3);
    for (Index k = 0; k < 3; ++k) {
      const Vector row = basis.loadings.row(k);
      const double scale = row.cwiseAbs().maxCoeff();
      for (Index i = 0; i < row.size(); ++i) {
        if (std::abs(row(i)) <= 1e-12 * scale) continue;
        CHECK(row(i) > 0);
        break;
      }
    }
  }
}

TEST_CASE("project_components with a selection loading picks leading columns") {
  const Matrix m = oracle::random_matrix(4, 3, 8);
  Matrix u = Matrix::Zero(2, 3);
  u(0, 0) = 1;
  u(1, 1) = 1;
  const Matrix p = project_components(m, u);
  CHECK((p.col(0) - m.col(0)).norm() == 0);
  CHECK((p.col(1) - m.col(1)).norm() == 0);
}

TEST_CASE("project_components of the zero matrix is zero") {
  const Matrix p =
      project_components(Matrix::Zero(3, 4), oracle::random_matrix(2, 4, 1));
  CHECK(p.norm() == 0);
}

TEST_CASE("project_components matches the naive product oracle") {
  const Matrix m = oracle::random_matrix(5, 4, 21);
  const Matrix u = oracle::random_matrix(2, 4, 22);
  const Matrix p = project_components(m, u);
  const Matrix expected = oracle::naive_matmul(m, u.transpose());
  CHECK((p - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("project_components rejects mismatched shapes") {
  CHECK_THROWS_AS(project_components(Matrix::Zero(3, 4), Matrix::Zero(2, 5)),
                  std::invalid_argument);
}

TEST_CASE("projection through an orthonormal basis never expands the norm") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Matrix m0 = oracle::random_matrix(8, 6, 200 + seed);
    const SpectralBasis basis = top_r_eig(m0, 3);
    const Matrix m = oracle::random_matrix(8, 6, 300 + seed);
    const Matrix projected = project_components(m, basis.loadings) * basis.loadings;
    CHECK(projected.norm() <= m.norm() * (1 + 1e-12));
  }
}

TEST_CASE("top-r eigenvalue mass is bounded by the squared norm") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix m0 = oracle::random_matrix(7, 5, 400 + seed);
    const SpectralBasis basis = top_r_eig(m0, 4);
    CHECK(basis.eigenvalues.minCoeff() >= -1e-9);
    for (Index k = 1; k < basis.eigenvalues.size(); ++k)
      CHECK(basis.eigenvalues(k) <= basis.eigenvalues(k - 1) + 1e-12);
    CHECK(basis.eigenvalues.sum() <= m0.squaredNorm() + 1e-6);
  }
}

TEST_CASE("full-rank loadings reconstruct exactly") {
  const Matrix m0 = oracle::random_matrix(6, 4, 31);
  const SpectralBasis basis = top_r_eig(m0, 4);
  const Matrix gram = basis.loadings * basis.loadings.transpose();
  CHECK((gram - Matrix::Identity(4, 4)).norm() < 1e-8);
  const Matrix m = oracle::random_matrix(6, 4, 32);
  const Matrix back = project_components(m, basis.loadings) * basis.loadings;
  CHECK((back - m).norm() < 1e-8);
}

TEST_CASE("dense and subspace eigensolvers agree") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix m0 = oracle::random_matrix(40, 30, 500 + seed);
    const SpectralBasis dense = detail::dense_top_eig(m0, 4);
    const SpectralBasis iter = detail::subspace_top_eig(m0, 4);
    for (Index k = 0; k < 4; ++k) {
      CHECK(std::abs(dense.eigenvalues(k) - iter.eigenvalues(k)) <=
            1e-7 * std::max(1.0, dense.eigenvalues(k)));
      CHECK((dense.loadings.row(k) - iter.loadings.row(k)).norm() < 1e-6);
    }
  }
}
