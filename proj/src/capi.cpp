#include "srpca/srpca.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include <json.hpp>

#include "srpca/bench.hpp"
#include "srpca/completion.hpp"
#include "srpca/io.hpp"
#include "srpca/metrics.hpp"
#include "srpca/observation.hpp"
#include "srpca/types.hpp"

struct srpca_matrix {
  srpca::ObservedMatrix data;
};

struct srpca_result {
  srpca::CompletionResult result;
  srpca::CompletionConfig cfg;
  srpca::ObservedMatrix input;
};

namespace {

thread_local std::string t_error;

srpca_status fail(srpca_status code, const std::string& what) {
  t_error = what;
  return code;
}

template <typename Fn>
srpca_status guarded(Fn&& fn) {
  try {
    t_error.clear();
    return fn();
  } catch (const std::invalid_argument& e) {
    return fail(SRPCA_ERR_ARGUMENT, e.what());
  } catch (const srpca::ParseError& e) {
    return fail(SRPCA_ERR_PARSE, e.what());
  } catch (const srpca::IoError& e) {
    return fail(SRPCA_ERR_IO, e.what());
  } catch (const srpca::DivergenceError& e) {
    return fail(SRPCA_ERR_DIVERGED, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SRPCA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SRPCA_ERR_INTERNAL, e.what());
  }
}

srpca_status require(bool ok, const char* what) {
  if (ok) return SRPCA_OK;
  return fail(SRPCA_ERR_ARGUMENT, what);
}

srpca::CompletionConfig to_cpp_config(const srpca_config& c) {
  srpca::CompletionConfig cfg;
  switch (c.algorithm) {
    case SRPCA_ALG_SRPCA: cfg.algorithm = srpca::Algorithm::srpca; break;
    case SRPCA_ALG_FAST_SRPCA:
      cfg.algorithm = srpca::Algorithm::fast_srpca;
      break;
    case SRPCA_ALG_SVT: cfg.algorithm = srpca::Algorithm::svt; break;
    case SRPCA_ALG_ALS: cfg.algorithm = srpca::Algorithm::als; break;
    default:
      throw std::invalid_argument("config: unknown algorithm id " +
                                  std::to_string(c.algorithm));
  }
  cfg.rank = c.rank;
  cfg.tol = c.tol;
  cfg.lambda = c.lambda_;
  cfg.max_iter = c.max_iter;
  cfg.seed = c.seed;
  cfg.standardize = c.standardize != 0;
  cfg.ridge = c.ridge;
  cfg.svt_tau = c.svt_tau;
  cfg.svt_delta = c.svt_delta;
  cfg.svt_soft = c.svt_soft != 0;
  cfg.validate();
  return cfg;
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* srpca_version(void) { return "1.0.0"; }

const char* srpca_last_error(void) { return t_error.c_str(); }

void srpca_string_free(char* s) { delete[] s; }

void srpca_config_defaults(srpca_config* cfg) {
  if (cfg == nullptr) return;
  const srpca::CompletionConfig d;
  cfg->algorithm = SRPCA_ALG_SRPCA;
  cfg->rank = static_cast<int32_t>(d.rank);
  cfg->tol = d.tol;
  cfg->lambda_ = d.lambda;
  cfg->max_iter = d.max_iter;
  cfg->seed = d.seed;
  cfg->standardize = d.standardize ? 1 : 0;
  cfg->ridge = d.ridge;
  cfg->svt_tau = d.svt_tau;
  cfg->svt_delta = d.svt_delta;
  cfg->svt_soft = d.svt_soft ? 1 : 0;
}

srpca_status srpca_matrix_create(int64_t rows, int64_t cols,
                                 const double* values, const uint8_t* mask,
                                 srpca_matrix** out) {
  return guarded([&]() -> srpca_status {
    if (srpca_status s = require(out != nullptr, "matrix_create: out is null"))
      return s;
    if (srpca_status s =
            require(values != nullptr, "matrix_create: values is null"))
      return s;
    if (rows < 1 || cols < 1)
      throw std::invalid_argument("matrix_create: dimensions must be positive");
    auto m = std::make_unique<srpca_matrix>();
    m->data.values.resize(rows, cols);
    m->data.mask.resize(rows, cols);
    for (int64_t i = 0; i < rows; ++i)
      for (int64_t j = 0; j < cols; ++j) {
        const bool observed = mask == nullptr || mask[i * cols + j] != 0;
        m->data.mask(i, j) = observed;
        m->data.values(i, j) = observed ? values[i * cols + j] : 0.0;
      }
    m->data.validate();
    *out = m.release();
    return SRPCA_OK;
  });
}

srpca_status srpca_matrix_load_csv(const char* path, srpca_matrix** out) {
  return guarded([&]() -> srpca_status {
    if (srpca_status s = require(path != nullptr && out != nullptr,
                                 "matrix_load_csv: null argument"))
      return s;
    auto m = std::make_unique<srpca_matrix>();
    m->data = srpca::load_csv(path);
    *out = m.release();
    return SRPCA_OK;
  });
}

srpca_status srpca_matrix_load_pgm(const char* path, const char* mask_path,
                                   int32_t* maxval_out, srpca_matrix** out) {
  return guarded([&]() -> srpca_status {
    if (srpca_status s = require(path != nullptr && out != nullptr,
                                 "matrix_load_pgm: null argument"))
      return s;
    srpca::PgmImage image =
        srpca::load_pgm(path, mask_path == nullptr ? "" : mask_path);
    auto m = std::make_unique<srpca_matrix>();
    m->data = std::move(image.data);
    if (maxval_out != nullptr) *maxval_out = image.maxval;
    *out = m.release();
    return SRPCA_OK;
  });
}

srpca_status srpca_matrix_load_movielens(const char* path,
                                         int64_t* duplicates_out,
                                         srpca_matrix** out) {
  return guarded([&]() -> srpca_status {
    if (srpca_status s = require(path != nullptr && out != nullptr,
                                 "matrix_load_movielens: null argument"))
      return s;
    srpca::MovielensData data = srpca::load_movielens(path);
    auto m = std::make_unique<srpca_matrix>();
    m->data = std::move(data.matrix);
    if (duplicates_out != nullptr) *duplicates_out = data.duplicate_count;
    *out = m.release();
    return SRPCA_OK;
  });
}

srpca_status srpca_matrix_save_csv(const srpca_matrix* m, const char* path) {
  return guarded([&]() -> srpca_status {
    if (srpca_status s = require(m != nullptr && path != nullptr,
                                 "matrix_save_csv: null argument"))
      return s;
    srpca::save_csv(path, m->data);
    return SRPCA_OK;
  });
}

srpca_status srpca_matrix_save_pgm(const srpca_matrix* m, const char* path,
                                   int32_t maxval) {
  return guarded([&]() -> srpca_status {
    if (srpca_status s = require(m != nullptr && path != nullptr,
                                 "matrix_save_pgm: null argument"))
      return s;
    srpca::save_pgm(path, m->data.values, maxval);
    return SRPCA_OK;
  });
}

int64_t srpca_matrix_rows(const srpca_matrix* m) {
  return m == nullptr ? 0 : m->data.rows();
}

int64_t srpca_matrix_cols(const srpca_matrix* m) {
  return m == nullptr ? 0 : m->data.cols();
}

int64_t srpca_matrix_observed_count(const srpca_matrix* m) {
  return m == nullptr ? 0 : m->data.observed_count();
}

srpca_status srpca_matrix_values(const srpca_matrix* m, double* out) {
  return guarded([&]() -> srpca_status {
    if (srpca_status s = require(m != nullptr && out != nullptr,
                                 "matrix_values: null argument"))
      return s;
    const auto& d = m->data;
    for (srpca::Index i = 0; i < d.rows(); ++i)
      for (srpca::Index j = 0; j < d.cols(); ++j)
        out[i * d.cols() + j] =
            d.mask(i, j) ? d.values(i, j)
                         : std::numeric_limits<double>::quiet_NaN();
    return SRPCA_OK;
  });
}

srpca_status srpca_matrix_observed_range(const srpca_matrix* m,
                                         double* min_out, double* max_out) {
  return guarded([&]() -> srpca_status {
    if (srpca_status s = require(m != nullptr, "matrix_observed_range: null"))
      return s;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    const auto& d = m->data;
    for (srpca::Index j = 0; j < d.cols(); ++j)
      for (srpca::Index i = 0; i < d.rows(); ++i)
        if (d.mask(i, j)) {
          lo = std::min(lo, d.values(i, j));
          hi = std::max(hi, d.values(i, j));
        }
    if (lo > hi)
      throw std::invalid_argument("matrix_observed_range: no observed entries");
    if (min_out != nullptr) *min_out = lo;
    if (max_out != nullptr) *max_out = hi;
    return SRPCA_OK;
  });
}

uint64_t srpca_matrix_fingerprint(const srpca_matrix* m) {
  return m == nullptr ? 0 : srpca::fingerprint(m->data);
}

srpca_status srpca_matrix_mask_random(const srpca_matrix* m,
                                      double missing_fraction, uint64_t seed,
                                      srpca_matrix** out) {
  return guarded([&]() -> srpca_status {
    if (srpca_status s = require(m != nullptr && out != nullptr,
                                 "matrix_mask_random: null argument"))
      return s;
    auto hidden = std::make_unique<srpca_matrix>();
    hidden->data =
        srpca::holdout_split(m->data, missing_fraction, seed).train;
    *out = hidden.release();
    return SRPCA_OK;
  });
}

srpca_status srpca_matrix_holdout(const srpca_matrix* m, double fraction,
                                  uint64_t seed, srpca_matrix** train_out,
                                  srpca_matrix** holdout_out) {
  return guarded([&]() -> srpca_status {
    if (srpca_status s =
            require(m != nullptr && train_out != nullptr &&
                        holdout_out != nullptr,
                    "matrix_holdout: null argument"))
      return s;
    srpca::HoldoutSplit split = srpca::holdout_split(m->data, fraction, seed);
    auto train = std::make_unique<srpca_matrix>();
    auto holdout = std::make_unique<srpca_matrix>();
    train->data = std::move(split.train);
    holdout->data = std::move(split.holdout);
    *train_out = train.release();
    *holdout_out = holdout.release();
    return SRPCA_OK;
  });
}

void srpca_matrix_free(srpca_matrix* m) { delete m; }

srpca_status srpca_complete(const srpca_matrix* x, const srpca_config* cfg,
                            srpca_progress_fn progress, void* user,
                            srpca_result** out) {
  return guarded([&]() -> srpca_status {
    if (srpca_status s = require(x != nullptr && cfg != nullptr &&
                                     out != nullptr,
                                 "complete: null argument"))
      return s;
    const srpca::CompletionConfig cpp_cfg = to_cpp_config(*cfg);
    srpca::ProgressFn fn;
    if (progress != nullptr)
      fn = [progress, user](int iteration, double residual) {
        progress(iteration, residual, user);
      };
    auto r = std::make_unique<srpca_result>();
    r->result = srpca::complete(x->data, cpp_cfg, fn);
    r->cfg = cpp_cfg;
    r->input = x->data;
    *out = r.release();
    return SRPCA_OK;
  });
}

int32_t srpca_result_iterations(const srpca_result* r) {
  return r == nullptr ? 0
                      : static_cast<int32_t>(r->result.trace.iterations());
}

int32_t srpca_result_termination(const srpca_result* r) {
  if (r == nullptr) return SRPCA_TERM_MAX_ITER;
  switch (r->result.trace.termination) {
    case srpca::Termination::converged: return SRPCA_TERM_CONVERGED;
    case srpca::Termination::max_iter: return SRPCA_TERM_MAX_ITER;
    case srpca::Termination::fast_fixpoint: return SRPCA_TERM_FAST_FIXPOINT;
  }
  return SRPCA_TERM_MAX_ITER;
}

double srpca_result_wall_seconds(const srpca_result* r) {
  return r == nullptr ? 0.0 : r->result.wall_seconds;
}

srpca_status srpca_result_values(const srpca_result* r, double* out) {
  return guarded([&]() -> srpca_status {
    if (srpca_status s = require(r != nullptr && out != nullptr,
                                 "result_values: null argument"))
      return s;
    const srpca::Matrix& m = r->result.matrix;
    for (srpca::Index i = 0; i < m.rows(); ++i)
      for (srpca::Index j = 0; j < m.cols(); ++j)
        out[i * m.cols() + j] = m(i, j);
    return SRPCA_OK;
  });
}

srpca_status srpca_result_residuals(const srpca_result* r, double* residuals,
                                    int64_t* count_out) {
  return guarded([&]() -> srpca_status {
    if (srpca_status s = require(r != nullptr && count_out != nullptr,
                                 "result_residuals: null argument"))
      return s;
    const auto& res = r->result.trace.residuals;
    if (residuals != nullptr) {
      const int64_t take =
          std::min<int64_t>(*count_out, static_cast<int64_t>(res.size()));
      for (int64_t k = 0; k < take; ++k) residuals[k] = res[k];
    }
    *count_out = static_cast<int64_t>(res.size());
    return SRPCA_OK;
  });
}

srpca_status srpca_result_report_json(const srpca_result* r, char** out) {
  return guarded([&]() -> srpca_status {
    if (srpca_status s = require(r != nullptr && out != nullptr,
                                 "result_report_json: null argument"))
      return s;
    const srpca::MetricReport metrics =
        srpca::make_report(r->input, r->result, r->cfg);
    nlohmann::json j;
    j["config"] = srpca::config_to_json(r->cfg);
    j["dataset"] = {{"rows", r->input.rows()},
                    {"cols", r->input.cols()},
                    {"observed", r->input.observed_count()},
                    {"fingerprint", srpca::fingerprint(r->input)}};
    j["metrics"] = {
        {"algorithm", metrics.algorithm},
        {"observed_sq_residual", metrics.observed_sq_residual},
        {"observed_sq_residual_std", metrics.observed_sq_residual_std},
        {"iterations", metrics.iterations},
        {"termination", metrics.termination},
        {"wall_seconds", metrics.wall_seconds},
        {"bound", metrics.bound}};
    j["trace"] = {{"residuals", r->result.trace.residuals},
                  {"alphas", r->result.trace.alphas},
                  {"seconds", r->result.trace.seconds},
                  {"termination", srpca::to_string(r->result.trace.termination)}};
    if (r->result.trace.termination == srpca::Termination::fast_fixpoint) {
      j["trace"]["fixpoint_delta"] = r->result.trace.fixpoint_delta;
      j["trace"]["fixpoint_scale"] = r->result.trace.fixpoint_scale;
    }
    j["flags"] = {{"unobserved_columns", r->result.unobserved_columns},
                  {"unobserved_rows", r->result.unobserved_rows},
                  {"singular_columns", r->result.singular_columns}};
    *out = copy_string(j.dump(2) + "\n");
    return SRPCA_OK;
  });
}

void srpca_result_free(srpca_result* r) { delete r; }

srpca_status srpca_observed_residual(const srpca_matrix* x,
                                     const srpca_result* r, double* out) {
  return guarded([&]() -> srpca_status {
    if (srpca_status s = require(x != nullptr && r != nullptr &&
                                     out != nullptr,
                                 "observed_residual: null argument"))
      return s;
    *out = srpca::observed_residual(x->data, r->result.matrix);
    return SRPCA_OK;
  });
}

srpca_status srpca_nmae(const srpca_matrix* holdout, const srpca_result* r,
                        const srpca_matrix* train, int32_t clip, double* out) {
  return guarded([&]() -> srpca_status {
    if (srpca_status s = require(holdout != nullptr && r != nullptr &&
                                     train != nullptr && out != nullptr,
                                 "nmae: null argument"))
      return s;
    *out = srpca::nmae(r->result.matrix, holdout->data, train->data,
                       clip != 0);
    return SRPCA_OK;
  });
}

srpca_status srpca_bench_run_file(const char* scenario_path, char** out) {
  return guarded([&]() -> srpca_status {
    if (srpca_status s = require(scenario_path != nullptr && out != nullptr,
                                 "bench_run_file: null argument"))
      return s;
    const srpca::BenchmarkScenario scenario =
        srpca::scenario_from_file(scenario_path);
    *out = copy_string(srpca::bench_run(scenario).dump(2) + "\n");
    return SRPCA_OK;
  });
}

srpca_status srpca_bench_run_json(const char* scenario_json, char** out) {
  return guarded([&]() -> srpca_status {
    if (srpca_status s = require(scenario_json != nullptr && out != nullptr,
                                 "bench_run_json: null argument"))
      return s;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(scenario_json);
    } catch (const nlohmann::json::exception& e) {
      throw srpca::ParseError(std::string("scenario: ") + e.what());
    }
    const srpca::BenchmarkScenario scenario = srpca::scenario_from_json(j);
    *out = copy_string(srpca::bench_run(scenario).dump(2) + "\n");
    return SRPCA_OK;
  });
}

}  // extern "C"
