#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "srpca/completion.hpp"
#include "srpca/observation.hpp"

using namespace srpca;

TEST_CASE("alpha_select compares the residual norm against lambda") {
  CHECK(alpha_select(0.5, 1.0) == 0);
  CHECK(alpha_select(2.0, 1.0) == 1);
  CHECK(alpha_select(1.0, 1.0) == 0);  // ties take the terminating branch
  CHECK(alpha_select(0.1, 0.0) == 1);  // lambda 0 never stops a nonzero residual
  CHECK(alpha_select(0.0, 0.0) == 0);
}

TEST_CASE("blend_observed at alpha 1 imposes the observations") {
  const Matrix values = oracle::random_matrix(5, 4, 1);
  ObservedMatrix x = oracle::with_mask(values, random_mask(5, 4, 0.3, 2));
  const Matrix model = oracle::random_matrix(5, 4, 3);
  const Matrix out = blend_observed(x, model, 1);
  for (Index j = 0; j < 4; ++j)
    for (Index i = 0; i < 5; ++i)
      CHECK(out(i, j) == (x.mask(i, j) ? x.values(i, j) : model(i, j)));
}

TEST_CASE("blend_observed at alpha 0 returns the model unchanged") {
  const Matrix values = oracle::random_matrix(5, 4, 4);
  ObservedMatrix x = oracle::with_mask(values, random_mask(5, 4, 0.3, 5));
  const Matrix model = oracle::random_matrix(5, 4, 6);
  const Matrix out = blend_observed(x, model, 0);
  CHECK((out.array() == model.array()).all());
}

TEST_CASE("blend_observed is idempotent once the model matches on the mask") {
  const Matrix values = oracle::random_matrix(5, 4, 7);
  ObservedMatrix x = oracle::with_mask(values, random_mask(5, 4, 0.3, 8));
  Matrix model = oracle::random_matrix(5, 4, 9);
  for (Index j = 0; j < 4; ++j)
    for (Index i = 0; i < 5; ++i)
      if (x.mask(i, j)) model(i, j) = x.values(i, j);
  const Matrix out = blend_observed(x, model, 1);
  CHECK((out.array() == model.array()).all());
}

TEST_CASE("blend_observed rejects alpha values outside {0,1}") {
  const ObservedMatrix x = ObservedMatrix::dense(Matrix::Zero(2, 2));
  CHECK_THROWS_AS(blend_observed(x, Matrix::Zero(2, 2), 2),
                  std::invalid_argument);
}

TEST_CASE("fast variant with lambda 0 matches the plain algorithm bit-for-bit") {
  const Matrix truth = oracle::lowrank_matrix(40, 25, 2, 50);
  ObservedMatrix x = oracle::with_mask(truth, random_mask(40, 25, 0.5, 51));

  CompletionConfig cfg;
  cfg.rank = 2;
  cfg.tol = 1e-6;
  cfg.seed = 12;
  cfg.lambda = 0.0;

  const CompletionResult plain = srpca_complete(x, cfg);
  const CompletionResult fast = fast_srpca_complete(x, cfg);

  CHECK(fast.trace.termination == plain.trace.termination);
  REQUIRE(fast.trace.residuals.size() == plain.trace.residuals.size());
  for (std::size_t k = 0; k < plain.trace.residuals.size(); ++k)
    CHECK(fast.trace.residuals[k] == plain.trace.residuals[k]);
  CHECK((fast.matrix.array() == plain.matrix.array()).all());

  // The blending weight stays at 1 the whole way down.
  REQUIRE(fast.trace.alphas.size() == fast.trace.iterations());
  for (int alpha : fast.trace.alphas) CHECK(alpha == 1);
  CHECK(plain.trace.alphas.empty());
}

TEST_CASE("a lambda above the initial residual stops at the first check") {
  const Matrix truth = oracle::lowrank_matrix(30, 20, 1, 60);
  ObservedMatrix x = oracle::with_mask(truth, random_mask(30, 20, 0.5, 61));

  CompletionConfig cfg;
  cfg.rank = 1;
  cfg.tol = 1e-10;
  cfg.seed = 3;
  cfg.standardize = false;
  cfg.lambda = 1e9;  // far above any residual norm this instance can produce

  const CompletionResult result = fast_srpca_complete(x, cfg);
  CHECK(result.trace.termination == Termination::fast_fixpoint);
  CHECK(result.trace.iterations() == 2);  // one solve, one confirming solve
  CHECK(result.trace.fixpoint_delta <= 1e-10);
  CHECK(result.trace.fixpoint_scale > 0.0);
}

TEST_CASE("the confirming solve reproduces the stopped estimate") {
  int fired = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix truth = oracle::lowrank_matrix(25, 18, 2, 70 + seed);
    ObservedMatrix x =
        oracle::with_mask(truth, random_mask(25, 18, 0.4, 80 + seed));

    CompletionConfig cfg;
    cfg.rank = 2;
    cfg.tol = 1e-12;
    cfg.seed = seed;
    cfg.standardize = false;
    cfg.max_iter = 400;
    // Low enough to need several iterations, high enough to fire on the way
    // down (the noiseless residual norm heads to 0).
    cfg.lambda = 1.0;

    const CompletionResult result = fast_srpca_complete(x, cfg);
    if (result.trace.termination != Termination::fast_fixpoint) continue;
    ++fired;
    CHECK(result.trace.iterations() > 2);
    CHECK(result.trace.fixpoint_delta <=
          1e-9 * (1.0 + result.trace.fixpoint_scale));
  }
  CHECK(fired == 10);
}

TEST_CASE("a mid-range lambda converges earlier and lands near the plain result") {
  const Matrix truth = oracle::lowrank_matrix(3, 2, 1, 0);
  Matrix values(3, 2);
  values << 1, 2, 2, 4, 3, 6;
  ObservedMatrix x = ObservedMatrix::dense(values);
  x.mask(2, 1) = false;
  x.values(2, 1) = 0;

  CompletionConfig cfg;
  cfg.rank = 1;
  cfg.tol = 1e-12;
  cfg.seed = 3;
  cfg.standardize = false;
  cfg.max_iter = 2000;

  const CompletionResult plain = srpca_complete(x, cfg);
  REQUIRE(plain.trace.termination == Termination::converged);
  CHECK(plain.matrix(2, 1) == doctest::Approx(6.0).epsilon(1e-5));

  cfg.lambda = 1e-5;  // between the converged residual norm (~0) and the start
  const CompletionResult fast = fast_srpca_complete(x, cfg);
  CHECK(fast.trace.termination == Termination::fast_fixpoint);
  CHECK(fast.trace.iterations() < plain.trace.iterations());
  CHECK(fast.matrix(2, 1) == doctest::Approx(plain.matrix(2, 1)).epsilon(1e-4));
}

TEST_CASE("recorded alphas are binary and zero only terminates") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix truth = oracle::lowrank_matrix(20, 16, 2, 300 + seed);
    ObservedMatrix x =
        oracle::with_mask(truth, random_mask(20, 16, 0.5, 400 + seed));

    CompletionConfig cfg;
    cfg.rank = 2;
    cfg.tol = 1e-8;
    cfg.seed = seed;
    cfg.lambda = 0.05 * static_cast<double>(seed);

    const CompletionResult result = fast_srpca_complete(x, cfg);
    const auto& alphas = result.trace.alphas;
    REQUIRE(alphas.size() == result.trace.iterations());
    for (std::size_t k = 0; k < alphas.size(); ++k) {
      CHECK((alphas[k] == 0 || alphas[k] == 1));
      if (alphas[k] == 0) {
        CHECK(k + 1 == alphas.size());
        CHECK(result.trace.termination == Termination::fast_fixpoint);
      }
    }
  }
}
