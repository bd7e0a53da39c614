#ifndef SRPCA_BASELINES_HPP
#define SRPCA_BASELINES_HPP

#include <vector>

#include "srpca/completion.hpp"
#include "srpca/types.hpp"

namespace srpca {

struct SvtConfig {
  double tau = 0;   // singular value cutoff; <= 0 picks the default
  double delta = 0; // constant gradient step; <= 0 picks the default
  // When nonempty, overrides delta with a per-iteration schedule; the last
  // entry repeats once the schedule runs out.
  std::vector<double> delta_schedule;
  double tol = 1e-4;
  int max_iter = 500;
  bool soft_threshold = false;
};

// Fills tau with sqrt(m) + sqrt(n) and delta with 1.2 * m * n / observed
// wherever the caller left them non-positive (and no schedule is given).
SvtConfig svt_defaults(SvtConfig cfg, Index rows, Index cols,
                       Index observed_count);

// Applies the cutoff through the SVD of m: hard mode zeroes singular values
// strictly below tau and keeps the rest unchanged; soft mode shrinks every
// value by tau and clamps at zero. Reconstructs from the surviving triplets.
Matrix svt_threshold(const Matrix& m, double tau, bool soft = false);

// Singular value thresholding on the observed cells. Starting from
// Y = D_tau(zero-filled X), iterates
//   M = D_tau(Y),  Y += delta_k * P_Omega(X - M)
// until the observed residual change is at most tol (needs two residuals)
// or max_iter. Throws DivergenceError, naming the step size, when the
// residual blows past 1e6 times its initial value.
CompletionResult svt_complete(const ObservedMatrix& x, const SvtConfig& cfg,
                              const ProgressFn& progress = {});

struct AlsConfig {
  int rank = 1;
  // Relative factor: the fixed per-run penalty is ridge times the mean
  // squared observed value, held constant so half-sweep monotonicity is
  // exact.
  double ridge = 1e-10;
  double tol = 1e-4;
  int max_iter = 500;
  std::uint64_t seed = 0;
};

// Called after every half sweep with the penalized objective
// ||P_Omega(X - U V^T)||_F^2 + penalty * (||U||_F^2 + ||V||_F^2).
using HalfSweepFn = std::function<void(double)>;

// Alternating ridge least squares over the observed cells, initialized from
// the truncated SVD of the zero-filled matrix. Each half sweep solves one
// factor exactly at fixed penalty, so the penalized objective never
// increases. Rows or columns with no observations get zero factors and are
// flagged on the result. Stops when the objective decrease per full sweep
// is at most tol.
CompletionResult als_complete(const ObservedMatrix& x, const AlsConfig& cfg,
                              const ProgressFn& progress = {},
                              const HalfSweepFn& half_sweep = {});

}  // namespace srpca

#endif
