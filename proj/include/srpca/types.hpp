#ifndef SRPCA_TYPES_HPP
#define SRPCA_TYPES_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace srpca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using MaskCol = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// Thrown by file loaders; the message carries the offending location.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown when a file cannot be opened or written at all.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown by the SVT iteration when the residual blows up.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// A partially observed matrix. mask(i,j) == true means values(i,j) is an
// observed entry; unobserved cells hold 0 in memory and are never read.
struct ObservedMatrix {
  Matrix values;
  Mask mask;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
  Index observed_count() const { return mask.count(); }

  // Wraps a fully observed dense matrix.
  static ObservedMatrix dense(Matrix m) {
    ObservedMatrix x;
    x.mask = Mask::Constant(m.rows(), m.cols(), true);
    x.values = std::move(m);
    return x;
  }

  // Dimension agreement plus the global at-least-one-observation rule.
  void validate() const {
    if (values.rows() != mask.rows() || values.cols() != mask.cols())
      throw std::invalid_argument("ObservedMatrix: mask/value dimensions differ");
    if (mask.count() == 0)
      throw std::invalid_argument("ObservedMatrix: no observed entries");
  }
};

// Per-column mean/scale over the observed entries (population convention).
// Columns with zero observed entries record mean 0, std 0 and are listed in
// empty_columns.
struct ColumnStats {
  Vector means;
  Vector stds;
  double epsilon = 0.0;
  std::vector<Index> empty_columns;

  static ColumnStats identity(Index n) {
    ColumnStats s;
    s.means = Vector::Zero(n);
    s.stds = Vector::Ones(n);
    s.epsilon = 0.0;
    return s;
  }
};

// Component matrix P (m x r) and loading matrix U (r x n); the current
// estimate of the completed matrix is components * loadings.
struct FactorPair {
  Matrix components;
  Matrix loadings;
  Index rank = 0;
};

enum class Algorithm { srpca, fast_srpca, svt, als };

enum class Termination { converged, max_iter, fast_fixpoint };

const char* to_string(Algorithm a);
const char* to_string(Termination t);
std::optional<Algorithm> algorithm_from_string(const std::string& name);

struct CompletionConfig {
  Index rank = 1;
  double tol = 1e-4;
  int max_iter = 500;
  std::uint64_t seed = 0;
  double lambda = 0.0;           // fast variant threshold; 0 disables the fast path
  bool standardize = true;
  Algorithm algorithm = Algorithm::srpca;
  // Relative ridge factor: the per-column normal matrix gets
  // ridge * trace(P^T P) / r added to its diagonal. 0 disables exactly.
  double ridge = 1e-10;
  // SVT-only knobs routed through the dispatcher; 0 = derive from data.
  double svt_tau = 0.0;
  double svt_delta = 0.0;
  bool svt_soft = false;

  void validate() const {
    if (rank < 1) throw std::invalid_argument("config: rank must be >= 1");
    if (!(tol > 0)) throw std::invalid_argument("config: tol must be > 0");
    if (max_iter < 1) throw std::invalid_argument("config: max_iter must be >= 1");
    if (ridge < 0) throw std::invalid_argument("config: ridge must be >= 0");
    if (lambda < 0) throw std::invalid_argument("config: lambda must be >= 0");
  }
};

// Per-iteration evidence: residuals[k] is the observed squared residual
// after the k-th loadings update, in the units the loop ran in.
struct IterationTrace {
  std::vector<double> residuals;
  std::vector<int> alphas;       // fast variant only, each entry 0 or 1
  std::vector<double> seconds;   // wall time per iteration
  Termination termination = Termination::max_iter;
  // Filled when termination == fast_fixpoint: ||M_new - M_prev||_F and
  // ||M_prev||_F at the iteration the alpha* = 0 shortcut fired.
  double fixpoint_delta = 0.0;
  double fixpoint_scale = 0.0;

  std::size_t iterations() const { return residuals.size(); }
};

struct CompletionResult {
  Matrix matrix;       // original units
  Matrix matrix_std;   // units the loop ran in
  std::optional<FactorPair> factors;
  IterationTrace trace;
  ColumnStats stats;
  bool standardized = false;
  std::vector<Index> unobserved_columns;  // zero loadings, predict the column mean
  std::vector<Index> unobserved_rows;     // zero row factors (alternating solver)
  std::vector<Index> singular_columns;    // minimum-norm fallback was taken
  double wall_seconds = 0.0;
};

}  // namespace srpca

#endif
