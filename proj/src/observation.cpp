#include "srpca/observation.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "srpca/rng.hpp"

namespace srpca {
namespace {

// Shuffles the first `take` slots of indices against the whole tail, the
// partial Fisher-Yates step. Afterwards indices[0 .. take) is a uniform
// sample without replacement.
void partial_shuffle(std::vector<Index>& indices, std::size_t take, Rng& rng) {
  const std::size_t n = indices.size();
  for (std::size_t i = 0; i < take && i + 1 < n; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.uniform_below(n - i));
    std::swap(indices[i], indices[j]);
  }
}

}  // namespace

StandardizeResult standardize(const ObservedMatrix& x, double epsilon) {
  x.validate();
  if (epsilon < 0)
    throw std::invalid_argument("standardize: epsilon must be >= 0");

  StandardizeResult out;
  out.matrix = x;
  out.stats.epsilon = epsilon;
  out.stats.means = Vector::Zero(x.cols());
  out.stats.stds = Vector::Zero(x.cols());

  for (Index j = 0; j < x.cols(); ++j) {
    Index count = 0;
    double sum = 0;
    for (Index i = 0; i < x.rows(); ++i) {
      if (!x.mask(i, j)) continue;
      sum += x.values(i, j);
      ++count;
    }
    if (count == 0) {
      out.stats.empty_columns.push_back(j);
      continue;
    }
    const double mean = sum / static_cast<double>(count);
    double sq = 0;
    for (Index i = 0; i < x.rows(); ++i) {
      if (!x.mask(i, j)) continue;
      const double d = x.values(i, j) - mean;
      sq += d * d;
    }
    const double sigma = std::sqrt(sq / static_cast<double>(count));
    out.stats.means(j) = mean;
    out.stats.stds(j) = sigma;

    const double denom = sigma + epsilon;
    for (Index i = 0; i < x.rows(); ++i) {
      if (!x.mask(i, j)) continue;
      const double centered = x.values(i, j) - mean;
      out.matrix.values(i, j) = denom == 0 ? 0.0 : centered / denom;
    }
  }
  return out;
}

Matrix destandardize(const Matrix& m, const ColumnStats& stats) {
  if (m.cols() != stats.means.size() || m.cols() != stats.stds.size())
    throw std::invalid_argument("destandardize: stats dimension mismatch");
  Matrix out = m;
  for (Index j = 0; j < m.cols(); ++j) {
    const double denom = stats.stds(j) + stats.epsilon;
    out.col(j) = m.col(j) * denom + Vector::Constant(m.rows(), stats.means(j));
  }
  return out;
}

Mask random_mask(Index rows, Index cols, double missing_fraction,
                 std::uint64_t seed) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("random_mask: dimensions must be positive");
  if (missing_fraction < 0 || missing_fraction >= 1)
    throw std::invalid_argument("random_mask: fraction must be in [0, 1)");

  const std::size_t total = static_cast<std::size_t>(rows * cols);
  const std::size_t hide = static_cast<std::size_t>(
      std::llround(missing_fraction * static_cast<double>(total)));

  std::vector<Index> cells(total);
  std::iota(cells.begin(), cells.end(), Index{0});
  Rng rng(seed);
  partial_shuffle(cells, hide, rng);

  Mask mask = Mask::Constant(rows, cols, true);
  for (std::size_t k = 0; k < hide; ++k) {
    const Index cell = cells[k];
    mask(cell % rows, cell / rows) = false;
  }
  return mask;
}

HoldoutSplit holdout_split(const ObservedMatrix& x, double fraction,
                           std::uint64_t seed) {
  x.validate();
  if (fraction < 0 || fraction >= 1)
    throw std::invalid_argument("holdout_split: fraction must be in [0, 1)");

  std::vector<Index> observed;
  observed.reserve(static_cast<std::size_t>(x.observed_count()));
  for (Index j = 0; j < x.cols(); ++j)
    for (Index i = 0; i < x.rows(); ++i)
      if (x.mask(i, j)) observed.push_back(j * x.rows() + i);

  const std::size_t hide = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(observed.size())));
  Rng rng(seed);
  partial_shuffle(observed, hide, rng);

  HoldoutSplit split;
  split.train = x;
  split.holdout.values = Matrix::Zero(x.rows(), x.cols());
  split.holdout.mask = Mask::Constant(x.rows(), x.cols(), false);
  for (std::size_t k = 0; k < hide; ++k) {
    const Index cell = observed[k];
    const Index i = cell % x.rows();
    const Index j = cell / x.rows();
    split.train.mask(i, j) = false;
    split.train.values(i, j) = 0.0;
    split.holdout.mask(i, j) = true;
    split.holdout.values(i, j) = x.values(i, j);
  }
  return split;
}

}  // namespace srpca
