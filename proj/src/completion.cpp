#include "srpca/completion.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "srpca/baselines.hpp"
#include "srpca/observation.hpp"
#include "srpca/parallel.hpp"
#include "srpca/spectral.hpp"

namespace srpca {

ColumnLoadings solve_column_loadings(const Matrix& components,
                                     const Eigen::Ref<const Vector>& column,
                                     const Eigen::Ref<const MaskCol>& column_mask,
                                     double ridge) {
  const Index m = components.rows();
  const Index r = components.cols();
  if (column.size() != m || column_mask.size() != m)
    throw std::invalid_argument("solve_column_loadings: dimension mismatch");
  if (ridge < 0)
    throw std::invalid_argument("solve_column_loadings: ridge must be >= 0");

  ColumnLoadings out;
  const Index observed = column_mask.count();
  if (observed == 0) {
    out.u = Vector::Zero(r);
    out.flag = ColumnLoadings::Flag::no_observations;
    return out;
  }

  Matrix p_obs(observed, r);
  Vector x_obs(observed);
  Index row = 0;
  for (Index i = 0; i < m; ++i) {
    if (!column_mask(i)) continue;
    p_obs.row(row) = components.row(i);
    x_obs(row) = column(i);
    ++row;
  }

  Matrix normal = p_obs.transpose() * p_obs;
  if (ridge > 0) normal.diagonal().array() += ridge;
  const Vector rhs = p_obs.transpose() * x_obs;

  Eigen::LLT<Matrix> llt(normal);
  if (llt.info() == Eigen::Success) {
    out.u = llt.solve(rhs);
    // A successful factorization of a semidefinite matrix can still return
    // garbage when the system is rank deficient; accept only solutions that
    // actually satisfy the normal equations.
    const double scale = std::max(1.0, rhs.norm());
    if ((normal * out.u - rhs).norm() <= 1e-8 * scale) return out;
  }

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(p_obs);
  out.u = cod.solve(x_obs);
  out.flag = ColumnLoadings::Flag::singular_min_norm;
  return out;
}

bool convergence_check(double residual_prev, double residual_curr, double tol) {
  return residual_prev - residual_curr <= tol;
}

std::int64_t iteration_bound(double residual_initial, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("iteration_bound: tol must be > 0");
  if (residual_initial < 0)
    throw std::invalid_argument("iteration_bound: residual must be >= 0");
  const double steps = std::ceil(residual_initial / tol);
  if (steps >= static_cast<double>(std::numeric_limits<std::int64_t>::max()))
    return std::numeric_limits<std::int64_t>::max();
  return static_cast<std::int64_t>(steps) + 1;
}

int alpha_select(double observed_residual_norm, double lambda) {
  return observed_residual_norm <= lambda ? 0 : 1;
}

Matrix blend_observed(const ObservedMatrix& x, const Matrix& m_model,
                      int alpha) {
  if (alpha != 0 && alpha != 1)
    throw std::invalid_argument("blend_observed: alpha must be 0 or 1");
  if (m_model.rows() != x.rows() || m_model.cols() != x.cols())
    throw std::invalid_argument("blend_observed: dimension mismatch");
  if (alpha == 0) return m_model;
  return x.mask.select(x.values, m_model);
}

namespace {

double masked_residual(const ObservedMatrix& x, const Matrix& estimate) {
  const Matrix diff =
      x.mask.select(x.values - estimate, Matrix::Zero(x.rows(), x.cols()));
  return diff.squaredNorm();
}

// Projection plus per-column solves, with m_in taken as given. The callers
// decide how observed data entered m_in (full re-imposition or an alpha
// blend).
IterateResult refit(const ObservedMatrix& x_std, const Matrix& m_in,
                    const Matrix& u_prev, const CompletionConfig& cfg) {
  const Index n = x_std.cols();
  const Index r = u_prev.rows();

  IterateResult out;
  out.components = m_in * u_prev.transpose();
  const double ridge_abs =
      cfg.ridge > 0
          ? cfg.ridge * out.components.squaredNorm() / static_cast<double>(r)
          : 0.0;

  out.loadings.resize(r, n);
  std::vector<unsigned char> flags(static_cast<std::size_t>(n), 0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t idx) {
    const Index j = static_cast<Index>(idx);
    const ColumnLoadings col = solve_column_loadings(
        out.components, x_std.values.col(j), x_std.mask.col(j), ridge_abs);
    out.loadings.col(j) = col.u;
    flags[idx] = static_cast<unsigned char>(col.flag);
  });
  for (Index j = 0; j < n; ++j) {
    const auto flag = static_cast<ColumnLoadings::Flag>(flags[j]);
    if (flag == ColumnLoadings::Flag::no_observations)
      out.unobserved_columns.push_back(j);
    else if (flag == ColumnLoadings::Flag::singular_min_norm)
      out.singular_columns.push_back(j);
  }

  out.estimate = out.components * out.loadings;
  out.residual = masked_residual(x_std, out.estimate);
  return out;
}

}  // namespace

IterateResult srpca_iterate(const ObservedMatrix& x_std, const Matrix& m_prev,
                            const Matrix& u_prev, const CompletionConfig& cfg) {
  return refit(x_std, blend_observed(x_std, m_prev, 1), u_prev, cfg);
}

namespace {

void merge_unique(std::vector<Index>& into, const std::vector<Index>& from) {
  for (Index j : from)
    if (std::find(into.begin(), into.end(), j) == into.end())
      into.push_back(j);
  std::sort(into.begin(), into.end());
}

// Shared loop behind both SRPCA variants. The fast path differs only in how
// observed cells feed back into the next projection (alpha blending) and in
// its extra stop rule.
CompletionResult run_srpca(const ObservedMatrix& x, const CompletionConfig& cfg,
                           const ProgressFn& progress,
                           const SmoothingHook& smoothing, bool fast) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();

  cfg.validate();
  x.validate();

  CompletionResult result;
  result.standardized = cfg.standardize;
  for (Index i = 0; i < x.rows(); ++i)
    if (!x.mask.row(i).any()) result.unobserved_rows.push_back(i);
  ObservedMatrix x_std;
  if (cfg.standardize) {
    StandardizeResult s = standardize(x);
    x_std = std::move(s.matrix);
    result.stats = std::move(s.stats);
  } else {
    x_std = x;
    result.stats = ColumnStats::identity(x.cols());
  }

  Matrix m_prev = init_estimate(x_std, cfg.seed);
  const SpectralBasis basis = top_r_eig(m_prev, cfg.rank);
  Matrix u_prev = basis.loadings;

  IterateResult step;
  int alpha_used = 1;
  bool fixpoint = false;
  for (int k = 0; k < cfg.max_iter; ++k) {
    const auto t_iter = clock::now();
    const Matrix blended = blend_observed(
        x_std, smoothing ? smoothing(m_prev) : m_prev, fast ? alpha_used : 1);
    step = refit(x_std, blended, u_prev, cfg);
    result.trace.residuals.push_back(step.residual);
    if (fast) result.trace.alphas.push_back(alpha_used);
    result.trace.seconds.push_back(
        std::chrono::duration<double>(clock::now() - t_iter).count());
    if (k == 0) result.unobserved_columns = step.unobserved_columns;
    merge_unique(result.singular_columns, step.singular_columns);
    if (progress) progress(k + 1, step.residual);

    if (fast && alpha_used == 0) {
      // The previous pass asked for no data feedback, so this pass ran as a
      // pure refit; record how far it moved and stop.
      result.trace.fixpoint_delta = (step.estimate - m_prev).norm();
      result.trace.fixpoint_scale = m_prev.norm();
      result.trace.termination = Termination::fast_fixpoint;
      fixpoint = true;
      m_prev = step.estimate;
      u_prev = step.loadings;
      break;
    }

    const std::size_t count = result.trace.residuals.size();
    if (count >= 2 && convergence_check(result.trace.residuals[count - 2],
                                        result.trace.residuals[count - 1],
                                        cfg.tol)) {
      result.trace.termination = Termination::converged;
      m_prev = step.estimate;
      u_prev = step.loadings;
      break;
    }

    if (fast)
      alpha_used = alpha_select(std::sqrt(step.residual), cfg.lambda);
    m_prev = step.estimate;
    u_prev = step.loadings;
  }
  if (!fixpoint && result.trace.termination != Termination::converged)
    result.trace.termination = Termination::max_iter;

  result.matrix_std = m_prev;
  result.matrix = cfg.standardize ? destandardize(m_prev, result.stats)
                                  : m_prev;
  FactorPair factors;
  factors.components = step.components;
  factors.loadings = step.loadings;
  factors.rank = u_prev.rows();
  result.factors = std::move(factors);
  result.wall_seconds =
      std::chrono::duration<double>(clock::now() - t_start).count();
  return result;
}

}  // namespace

CompletionResult srpca_complete(const ObservedMatrix& x,
                                const CompletionConfig& cfg,
                                const ProgressFn& progress,
                                const SmoothingHook& smoothing) {
  return run_srpca(x, cfg, progress, smoothing, false);
}

CompletionResult fast_srpca_complete(const ObservedMatrix& x,
                                     const CompletionConfig& cfg,
                                     const ProgressFn& progress,
                                     const SmoothingHook& smoothing) {
  return run_srpca(x, cfg, progress, smoothing, true);
}

namespace {

// Baselines run on the same standardized view the SRPCA variants use, then
// map back, so error comparisons across algorithms are apples to apples.
CompletionResult run_standardized_baseline(
    const ObservedMatrix& x, const CompletionConfig& cfg,
    const std::function<CompletionResult(const ObservedMatrix&)>& inner) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();

  CompletionResult result;
  if (cfg.standardize) {
    StandardizeResult s = standardize(x);
    result = inner(s.matrix);
    result.stats = std::move(s.stats);
    result.standardized = true;
    result.matrix_std = result.matrix;
    result.matrix = destandardize(result.matrix_std, result.stats);
  } else {
    result = inner(x);
    result.stats = ColumnStats::identity(x.cols());
    result.matrix_std = result.matrix;
  }
  result.wall_seconds =
      std::chrono::duration<double>(clock::now() - t_start).count();
  return result;
}

}  // namespace

CompletionResult complete(const ObservedMatrix& x, const CompletionConfig& cfg,
                          const ProgressFn& progress) {
  cfg.validate();
  switch (cfg.algorithm) {
    case Algorithm::srpca:
      return srpca_complete(x, cfg, progress);
    case Algorithm::fast_srpca:
      return fast_srpca_complete(x, cfg, progress);
    case Algorithm::svt: {
      SvtConfig svt;
      svt.tau = cfg.svt_tau;
      svt.delta = cfg.svt_delta;
      svt.tol = cfg.tol;
      svt.max_iter = cfg.max_iter;
      svt.soft_threshold = cfg.svt_soft;
      return run_standardized_baseline(x, cfg, [&](const ObservedMatrix& xin) {
        return svt_complete(xin, svt, progress);
      });
    }
    case Algorithm::als: {
      AlsConfig als;
      als.rank = static_cast<int>(cfg.rank);
      als.ridge = cfg.ridge;
      als.tol = cfg.tol;
      als.max_iter = cfg.max_iter;
      als.seed = cfg.seed;
      return run_standardized_baseline(x, cfg, [&](const ObservedMatrix& xin) {
        return als_complete(xin, als, progress);
      });
    }
  }
  throw std::invalid_argument("complete: unknown algorithm");
}

}  // namespace srpca
