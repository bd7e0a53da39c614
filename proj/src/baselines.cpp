#include "srpca/baselines.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "srpca/parallel.hpp"
#include "srpca/rng.hpp"

namespace srpca {

SvtConfig svt_defaults(SvtConfig cfg, Index rows, Index cols,
                       Index observed_count) {
  if (cfg.tau <= 0)
    cfg.tau = std::sqrt(static_cast<double>(rows)) +
              std::sqrt(static_cast<double>(cols));
  if (cfg.delta <= 0 && cfg.delta_schedule.empty()) {
    if (observed_count < 1)
      throw std::invalid_argument("svt_defaults: no observed entries");
    cfg.delta = 1.2 * static_cast<double>(rows) * static_cast<double>(cols) /
                static_cast<double>(observed_count);
  }
  return cfg;
}

Matrix svt_threshold(const Matrix& m, double tau, bool soft) {
  if (!m.allFinite())
    throw std::invalid_argument("svt_threshold: non-finite input");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector sigma = svd.singularValues();
  for (Index k = 0; k < sigma.size(); ++k) {
    if (soft)
      sigma(k) = std::max(sigma(k) - tau, 0.0);
    else if (sigma(k) < tau)
      sigma(k) = 0.0;
  }
  return svd.matrixU() * sigma.asDiagonal() * svd.matrixV().transpose();
}

CompletionResult svt_complete(const ObservedMatrix& x, const SvtConfig& cfg_in,
                              const ProgressFn& progress) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  x.validate();
  if (!(cfg_in.tol > 0)) throw std::invalid_argument("svt: tol must be > 0");
  if (cfg_in.max_iter < 1)
    throw std::invalid_argument("svt: max_iter must be >= 1");
  for (double d : cfg_in.delta_schedule)
    if (d < 0) throw std::invalid_argument("svt: negative step size");
  const SvtConfig cfg =
      svt_defaults(cfg_in, x.rows(), x.cols(), x.observed_count());

  const auto delta_at = [&cfg](int k) {
    if (cfg.delta_schedule.empty()) return cfg.delta;
    const std::size_t i = std::min(static_cast<std::size_t>(k),
                                   cfg.delta_schedule.size() - 1);
    return cfg.delta_schedule[i];
  };

  const Matrix zero_filled =
      x.mask.select(x.values, Matrix::Zero(x.rows(), x.cols()));
  Matrix y = svt_threshold(zero_filled, cfg.tau, cfg.soft_threshold);

  CompletionResult result;
  result.stats = ColumnStats::identity(x.cols());
  Matrix m;
  double initial_residual = -1;
  for (int k = 0; k < cfg.max_iter; ++k) {
    const auto t_iter = clock::now();
    m = svt_threshold(y, cfg.tau, cfg.soft_threshold);
    const Matrix gap =
        x.mask.select(x.values - m, Matrix::Zero(x.rows(), x.cols()));
    const double residual = gap.squaredNorm();
    const double delta = delta_at(k);
    y += delta * gap;

    result.trace.residuals.push_back(residual);
    result.trace.seconds.push_back(
        std::chrono::duration<double>(clock::now() - t_iter).count());
    if (progress) progress(k + 1, residual);

    if (initial_residual < 0) initial_residual = residual;
    if (residual > 1e6 * initial_residual) {
      std::ostringstream msg;
      msg << "svt diverged: residual " << residual << " exceeds 1e6 x initial "
          << initial_residual << " at iteration " << (k + 1)
          << " with step size " << delta;
      throw DivergenceError(msg.str());
    }

    const std::size_t count = result.trace.residuals.size();
    if (count >= 2 &&
        std::abs(result.trace.residuals[count - 2] - residual) <= cfg.tol) {
      result.trace.termination = Termination::converged;
      break;
    }
  }

  result.matrix = m;
  result.matrix_std = m;
  result.wall_seconds =
      std::chrono::duration<double>(clock::now() - t_start).count();
  return result;
}

namespace {

double penalized_objective(const ObservedMatrix& x, const Matrix& u,
                           const Matrix& v, double penalty) {
  const Matrix est = u * v.transpose();
  const Matrix gap =
      x.mask.select(x.values - est, Matrix::Zero(x.rows(), x.cols()));
  return gap.squaredNorm() + penalty * (u.squaredNorm() + v.squaredNorm());
}

// Ridge solve of one row of U (or one column factor of V) restricted to its
// observed cells: design rows come from the other factor.
Vector ridge_solve(const Matrix& design, const Vector& target, double penalty) {
  Matrix normal = design.transpose() * design;
  if (penalty > 0) normal.diagonal().array() += penalty;
  const Vector rhs = design.transpose() * target;
  Eigen::LLT<Matrix> llt(normal);
  if (llt.info() == Eigen::Success) {
    Vector sol = llt.solve(rhs);
    const double scale = std::max(1.0, rhs.norm());
    if ((normal * sol - rhs).norm() <= 1e-8 * scale) return sol;
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(design);
  return cod.solve(target);
}

}  // namespace

CompletionResult als_complete(const ObservedMatrix& x, const AlsConfig& cfg,
                              const ProgressFn& progress,
                              const HalfSweepFn& half_sweep) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  x.validate();
  if (cfg.rank < 1) throw std::invalid_argument("als: rank must be >= 1");
  if (!(cfg.tol > 0)) throw std::invalid_argument("als: tol must be > 0");
  if (cfg.max_iter < 1)
    throw std::invalid_argument("als: max_iter must be >= 1");
  if (cfg.ridge < 0) throw std::invalid_argument("als: ridge must be >= 0");

  const Index m = x.rows();
  const Index n = x.cols();
  const Index r = std::min<Index>(cfg.rank, std::min(m, n));

  const Matrix zero_filled = x.mask.select(x.values, Matrix::Zero(m, n));
  const double penalty =
      cfg.ridge * zero_filled.squaredNorm() /
      static_cast<double>(x.observed_count());

  Eigen::BDCSVD<Matrix> svd(zero_filled,
                            Eigen::ComputeThinU | Eigen::ComputeThinV);
  Matrix u(m, r);
  Matrix v(n, r);
  for (Index k = 0; k < r; ++k) {
    const double s = std::sqrt(svd.singularValues()(k));
    u.col(k) = svd.matrixU().col(k) * s;
    v.col(k) = svd.matrixV().col(k) * s;
  }

  CompletionResult result;
  result.stats = ColumnStats::identity(n);
  for (Index i = 0; i < m; ++i)
    if (!x.mask.row(i).any()) result.unobserved_rows.push_back(i);
  for (Index j = 0; j < n; ++j)
    if (!x.mask.col(j).any()) result.unobserved_columns.push_back(j);

  double prev_objective = -1;
  for (int k = 0; k < cfg.max_iter; ++k) {
    const auto t_iter = clock::now();

    parallel_for(static_cast<std::size_t>(m), [&](std::size_t idx) {
      const Index i = static_cast<Index>(idx);
      const Index count = x.mask.row(i).count();
      if (count == 0) {
        u.row(i).setZero();
        return;
      }
      Matrix design(count, r);
      Vector target(count);
      Index at = 0;
      for (Index j = 0; j < n; ++j) {
        if (!x.mask(i, j)) continue;
        design.row(at) = v.row(j);
        target(at) = x.values(i, j);
        ++at;
      }
      u.row(i) = ridge_solve(design, target, penalty).transpose();
    });
    if (half_sweep) half_sweep(penalized_objective(x, u, v, penalty));

    parallel_for(static_cast<std::size_t>(n), [&](std::size_t idx) {
      const Index j = static_cast<Index>(idx);
      const Index count = x.mask.col(j).count();
      if (count == 0) {
        v.row(j).setZero();
        return;
      }
      Matrix design(count, r);
      Vector target(count);
      Index at = 0;
      for (Index i = 0; i < m; ++i) {
        if (!x.mask(i, j)) continue;
        design.row(at) = u.row(i);
        target(at) = x.values(i, j);
        ++at;
      }
      v.row(j) = ridge_solve(design, target, penalty).transpose();
    });
    if (half_sweep) half_sweep(penalized_objective(x, u, v, penalty));

    const Matrix est = u * v.transpose();
    const Matrix gap = x.mask.select(x.values - est, Matrix::Zero(m, n));
    const double residual = gap.squaredNorm();
    result.trace.residuals.push_back(residual);
    result.trace.seconds.push_back(
        std::chrono::duration<double>(clock::now() - t_iter).count());
    if (progress) progress(k + 1, residual);

    if (prev_objective >= 0 && prev_objective - residual <= cfg.tol) {
      result.trace.termination = Termination::converged;
      break;
    }
    prev_objective = residual;
  }

  result.matrix = u * v.transpose();
  result.matrix_std = result.matrix;
  FactorPair factors;
  factors.components = u;
  factors.loadings = v.transpose();
  factors.rank = r;
  result.factors = std::move(factors);
  result.wall_seconds =
      std::chrono::duration<double>(clock::now() - t_start).count();
  return result;
}

}  // namespace srpca
