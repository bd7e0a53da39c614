#ifndef SRPCA_COMPLETION_HPP
#define SRPCA_COMPLETION_HPP

#include <functional>

#include "srpca/types.hpp"

namespace srpca {

// Invoked once per outer iteration with (iteration, observed squared residual).
using ProgressFn = std::function<void(int, double)>;

// Optional filter applied to the running estimate at the top of every outer
// iteration, before observed data is re-imposed. Empty means identity.
using SmoothingHook = std::function<Matrix(const Matrix&)>;

struct ColumnLoadings {
  Vector u;
  enum class Flag { ok, no_observations, singular_min_norm } flag =
      Flag::ok;
};

// Masked least squares for one column: minimizes
//   sum_{i observed} (x_i - (P u)_i)^2 + ridge * ||u||^2
// over u, with the 0/1 weight matrix realized by row selection. A column
// with no observations yields the zero vector (flagged); a singular normal
// matrix at ridge = 0 falls back to the minimum-norm solution (flagged).
ColumnLoadings solve_column_loadings(const Matrix& components,
                                     const Eigen::Ref<const Vector>& column,
                                     const Eigen::Ref<const MaskCol>& column_mask,
                                     double ridge);

struct IterateResult {
  Matrix estimate;    // components * loadings
  Matrix components;  // P, projected from the re-imposed estimate
  Matrix loadings;    // U_next
  double residual;    // ||P_Omega(X - estimate)||_F^2
  std::vector<Index> unobserved_columns;
  std::vector<Index> singular_columns;
};

// One outer iteration: re-impose X on the observed cells of m_prev, project
// to components, solve every column's loadings, recombine, and measure the
// observed squared residual of the new estimate.
IterateResult srpca_iterate(const ObservedMatrix& x_std, const Matrix& m_prev,
                            const Matrix& u_prev, const CompletionConfig& cfg);

// True exactly when residual_prev - residual_curr <= tol. A negative
// difference (residual grew) also terminates.
bool convergence_check(double residual_prev, double residual_curr, double tol);

// ceil(residual_initial / tol) + 1, the guaranteed iteration ceiling for a
// run whose first recorded residual is residual_initial.
std::int64_t iteration_bound(double residual_initial, double tol);

CompletionResult srpca_complete(const ObservedMatrix& x,
                                const CompletionConfig& cfg,
                                const ProgressFn& progress = {},
                                const SmoothingHook& smoothing = {});

// Step-size choice: 0 when the observed residual NORM (not squared) is at
// or below lambda, 1 otherwise. Equality takes the 0 branch.
int alpha_select(double observed_residual_norm, double lambda);

// On observed cells, (1 - alpha) * model + alpha * x; untouched elsewhere.
// alpha = 1 reproduces the plain re-imposition bit-exactly, alpha = 0 is
// the identity.
Matrix blend_observed(const ObservedMatrix& x, const Matrix& m_model,
                      int alpha);

// Same loop as srpca_complete except the re-imposition step blends by the
// most recent alpha*; once alpha* = 0 fires the loop runs one confirming
// solve and stops with termination fast_fixpoint. With lambda = 0 the run
// is bit-identical to srpca_complete under the same seed.
CompletionResult fast_srpca_complete(const ObservedMatrix& x,
                                     const CompletionConfig& cfg,
                                     const ProgressFn& progress = {},
                                     const SmoothingHook& smoothing = {});

// Dispatcher over cfg.algorithm; wraps the SVT/ALS baselines with the same
// standardize/destandardize pipeline the SRPCA variants use.
CompletionResult complete(const ObservedMatrix& x, const CompletionConfig& cfg,
                          const ProgressFn& progress = {});

}  // namespace srpca

#endif
