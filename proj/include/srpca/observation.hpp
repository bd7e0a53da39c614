#ifndef SRPCA_OBSERVATION_HPP
#define SRPCA_OBSERVATION_HPP

#include "srpca/types.hpp"

namespace srpca {

inline constexpr double kDefaultEpsilon = 1e-8;

struct StandardizeResult {
  ObservedMatrix matrix;
  ColumnStats stats;
};

// Centers and scales each column by the mean and population standard
// deviation of its observed entries: (x - mu_j) / (sigma_j + epsilon).
// Unobserved placeholders are untouched. Columns without observations are
// passed through and flagged in the stats. A zero denominator (sigma = 0
// and epsilon = 0) maps the column's observed entries to 0.
StandardizeResult standardize(const ObservedMatrix& x,
                              double epsilon = kDefaultEpsilon);

// Inverse map: every entry becomes m(i,j) * (sigma_j + epsilon) + mu_j.
Matrix destandardize(const Matrix& m, const ColumnStats& stats);

// Mask with exactly round(missing_fraction * rows * cols) unobserved cells,
// chosen uniformly without replacement by a partial Fisher-Yates shuffle of
// the column-major cell indices. true = observed.
Mask random_mask(Index rows, Index cols, double missing_fraction,
                 std::uint64_t seed);

struct HoldoutSplit {
  ObservedMatrix train;    // input with round(fraction * observed) entries hidden
  ObservedMatrix holdout;  // exactly the hidden entries
};

// Hides a fraction of the currently observed entries (never touching cells
// that are already missing). Same shuffle discipline as random_mask, applied
// to the column-major list of observed cells.
HoldoutSplit holdout_split(const ObservedMatrix& x, double fraction,
                           std::uint64_t seed);

}  // namespace srpca

#endif
