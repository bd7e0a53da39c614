#ifndef SRPCA_METRICS_HPP
#define SRPCA_METRICS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "srpca/types.hpp"

namespace srpca {

// ||P_Omega(x - m)||_F^2, the squared mismatch on observed cells only.
double observed_residual(const ObservedMatrix& x, const Matrix& m);

// Mean absolute error of `predicted` over the holdout cells, normalized by
// the value range:
//   sum |predicted - holdout| / ((x_max - x_min) * holdout_count).
// x_min and x_max describe the training observations, not the holdout. When
// clip is set, predictions are clamped into [x_min, x_max] before the error
// is taken. Throws std::invalid_argument when the holdout is empty or
// x_max <= x_min.
double nmae(const Matrix& predicted, const ObservedMatrix& holdout,
            double x_min, double x_max, bool clip = false);

// Convenience overload taking the range from train's observed values.
double nmae(const Matrix& predicted, const ObservedMatrix& holdout,
            const ObservedMatrix& train, bool clip = false);

struct TraceViolation {
  enum class Kind {
    residual_increase,   // residual rose beyond the slack
    weak_decrease,       // a non-final step made progress <= tol
    bound_exceeded,      // converged run as long as the guaranteed ceiling
    alpha_value,         // recorded alpha outside {0, 1}
    alpha_not_final      // an alpha of 0 was followed by more iterations
  };
  Kind kind;
  std::size_t iteration = 0;
  std::string detail;
};

// Checks a recorded run against its guarantees: residuals never rise by
// more than slack * max(1, previous), every non-final consecutive decrease
// exceeds tol, a converged run is strictly shorter than bound, alphas are
// all 0 or 1, and an alpha of 0 only appears at the final iteration.
std::vector<TraceViolation> verify_trace(const IterationTrace& trace,
                                         double tol, std::int64_t bound,
                                         double slack = 1e-9);

struct MetricReport {
  std::string algorithm;
  double observed_sq_residual = 0;       // original units
  double observed_sq_residual_std = 0;   // loop units
  std::optional<double> full_sq_error;   // needs ground truth
  std::optional<double> nmae_value;      // needs a holdout
  int iterations = 0;
  std::string termination;
  double wall_seconds = 0;
  std::int64_t bound = 0;
};

// Assembles the report from a finished run. truth (dense, original units)
// enables full_sq_error; holdout plus the training matrix enable NMAE.
MetricReport make_report(const ObservedMatrix& x, const CompletionResult& result,
                         const CompletionConfig& cfg,
                         const Matrix* truth = nullptr,
                         const ObservedMatrix* holdout = nullptr,
                         bool clip_nmae = false);

}  // namespace srpca

#endif
