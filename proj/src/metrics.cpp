#include "srpca/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "srpca/completion.hpp"

namespace srpca {

double observed_residual(const ObservedMatrix& x, const Matrix& m) {
  if (m.rows() != x.rows() || m.cols() != x.cols())
    throw std::invalid_argument("observed_residual: dimension mismatch");
  double sum = 0;
  for (Index j = 0; j < x.cols(); ++j)
    for (Index i = 0; i < x.rows(); ++i)
      if (x.mask(i, j)) {
        const double d = x.values(i, j) - m(i, j);
        sum += d * d;
      }
  return sum;
}

double nmae(const Matrix& predicted, const ObservedMatrix& holdout,
            double x_min, double x_max, bool clip) {
  if (predicted.rows() != holdout.rows() || predicted.cols() != holdout.cols())
    throw std::invalid_argument("nmae: dimension mismatch");
  if (!(x_max > x_min))
    throw std::invalid_argument("nmae: x_max must exceed x_min");
  const Index count = holdout.observed_count();
  if (count == 0) throw std::invalid_argument("nmae: empty holdout");

  double sum = 0;
  for (Index j = 0; j < holdout.cols(); ++j)
    for (Index i = 0; i < holdout.rows(); ++i) {
      if (!holdout.mask(i, j)) continue;
      double p = predicted(i, j);
      if (clip) p = std::clamp(p, x_min, x_max);
      sum += std::abs(p - holdout.values(i, j));
    }
  return sum / ((x_max - x_min) * static_cast<double>(count));
}

double nmae(const Matrix& predicted, const ObservedMatrix& holdout,
            const ObservedMatrix& train, bool clip) {
  train.validate();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (Index j = 0; j < train.cols(); ++j)
    for (Index i = 0; i < train.rows(); ++i) {
      if (!train.mask(i, j)) continue;
      lo = std::min(lo, train.values(i, j));
      hi = std::max(hi, train.values(i, j));
    }
  return nmae(predicted, holdout, lo, hi, clip);
}

namespace {

TraceViolation make_violation(TraceViolation::Kind kind, std::size_t iteration,
                              const std::string& detail) {
  TraceViolation v;
  v.kind = kind;
  v.iteration = iteration;
  v.detail = detail;
  return v;
}

}  // namespace

std::vector<TraceViolation> verify_trace(const IterationTrace& trace,
                                         double tol, std::int64_t bound,
                                         double slack) {
  if (trace.residuals.empty())
    throw std::invalid_argument("verify_trace: empty trace");

  std::vector<TraceViolation> out;
  const auto& res = trace.residuals;
  for (std::size_t k = 1; k < res.size(); ++k) {
    const double prev = res[k - 1];
    const double allowed = prev + slack * std::max(1.0, prev);
    if (res[k] > allowed) {
      std::ostringstream msg;
      msg << "residual rose from " << prev << " to " << res[k];
      out.push_back(
          make_violation(TraceViolation::Kind::residual_increase, k, msg.str()));
    }
    const bool final_pair = k + 1 == res.size();
    if (!final_pair && prev - res[k] <= tol) {
      std::ostringstream msg;
      msg << "non-final decrease " << prev - res[k] << " is <= tol " << tol;
      out.push_back(
          make_violation(TraceViolation::Kind::weak_decrease, k, msg.str()));
    }
  }

  if (trace.termination == Termination::converged &&
      static_cast<std::int64_t>(res.size()) >= bound) {
    std::ostringstream msg;
    msg << "converged after " << res.size() << " iterations, ceiling " << bound;
    out.push_back(make_violation(TraceViolation::Kind::bound_exceeded,
                                 res.size(), msg.str()));
  }

  for (std::size_t k = 0; k < trace.alphas.size(); ++k) {
    const int a = trace.alphas[k];
    if (a != 0 && a != 1) {
      std::ostringstream msg;
      msg << "alpha " << a << " outside {0, 1}";
      out.push_back(
          make_violation(TraceViolation::Kind::alpha_value, k, msg.str()));
    }
    if (a == 0 && k + 1 != trace.alphas.size())
      out.push_back(make_violation(TraceViolation::Kind::alpha_not_final, k,
                                   "alpha 0 was not the final iteration"));
  }
  return out;
}

MetricReport make_report(const ObservedMatrix& x, const CompletionResult& result,
                         const CompletionConfig& cfg, const Matrix* truth,
                         const ObservedMatrix* holdout, bool clip_nmae) {
  MetricReport report;
  report.algorithm = to_string(cfg.algorithm);
  report.observed_sq_residual = observed_residual(x, result.matrix);
  report.observed_sq_residual_std =
      result.trace.residuals.empty() ? 0.0 : result.trace.residuals.back();
  if (truth != nullptr)
    report.full_sq_error = (*truth - result.matrix).squaredNorm();
  if (holdout != nullptr)
    report.nmae_value = nmae(result.matrix, *holdout, x, clip_nmae);
  report.iterations = static_cast<int>(result.trace.iterations());
  report.termination = to_string(result.trace.termination);
  report.wall_seconds = result.wall_seconds;
  report.bound = result.trace.residuals.empty()
                     ? 1
                     : iteration_bound(result.trace.residuals.front(), cfg.tol);
  return report;
}

}  // namespace srpca
