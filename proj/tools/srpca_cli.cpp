#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "srpca/srpca.h"

namespace {

struct MatrixDeleter {
  void operator()(srpca_matrix* m) const { srpca_matrix_free(m); }
};
struct ResultDeleter {
  void operator()(srpca_result* r) const { srpca_result_free(r); }
};
using MatrixPtr = std::unique_ptr<srpca_matrix, MatrixDeleter>;
using ResultPtr = std::unique_ptr<srpca_result, ResultDeleter>;

int exit_code_for(srpca_status status) {
  switch (status) {
    case SRPCA_OK: return 0;
    case SRPCA_ERR_ARGUMENT: return 2;
    case SRPCA_ERR_PARSE: return 3;
    case SRPCA_ERR_IO: return 3;
    case SRPCA_ERR_DIVERGED: return 4;
    case SRPCA_ERR_INTERNAL: return 1;
  }
  return 1;
}

[[noreturn]] void die(srpca_status status, const std::string& context) {
  std::cerr << "error: " << context << ": " << srpca_last_error() << "\n";
  std::exit(exit_code_for(status));
}

struct CommonOptions {
  std::string input;
  std::string format = "csv";
  std::string mask_path;
  std::string algorithm = "srpca";
  int rank = 1;
  double tol = 1e-4;
  double lambda = 0.0;
  int max_iter = 500;
  std::uint64_t seed = 0;
  bool no_standardize = false;
  double tau = 0.0;
  double delta = 0.0;
  bool soft_threshold = false;
  std::string output;
  std::string report;
  int maxval = 255;
};

void add_algorithm_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--algorithm", opt.algorithm, "Completion algorithm")
      ->check(CLI::IsMember({"srpca", "fast-srpca", "svt", "als"}));
  cmd->add_option("--rank", opt.rank, "Factorization rank r")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol", opt.tol, "Convergence tolerance");
  cmd->add_option("--lambda", opt.lambda, "Fast variant threshold");
  cmd->add_option("--max-iter", opt.max_iter, "Iteration cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opt.seed, "RNG seed");
  cmd->add_flag("--no-standardize", opt.no_standardize,
                "Run on raw values without per-column standardization");
  cmd->add_option("--tau", opt.tau,
                  "Singular value cutoff (svt; 0 = derive from data)");
  cmd->add_option("--delta", opt.delta,
                  "Gradient step size (svt; 0 = derive from data)");
  cmd->add_flag("--soft-threshold", opt.soft_threshold,
                "Shrink singular values instead of zeroing (svt)");
}

void add_io_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--input", opt.input, "Input dataset")->required();
  cmd->add_option("--format", opt.format, "Input format")
      ->check(CLI::IsMember({"csv", "pgm", "movielens"}));
  cmd->add_option("--mask", opt.mask_path,
                  "Sidecar mask image (pgm; zero pixels mark missing cells)");
  cmd->add_option("--output", opt.output, "Write the completed matrix here");
  cmd->add_option("--report", opt.report,
                  "Write the JSON run report here (default: standard output)");
  cmd->add_option("--maxval", opt.maxval,
                  "Pixel ceiling for --output in pgm format")
      ->check(CLI::Range(1, 65535));
}

srpca_config build_config(const CommonOptions& opt) {
  srpca_config cfg;
  srpca_config_defaults(&cfg);
  if (opt.algorithm == "srpca") cfg.algorithm = SRPCA_ALG_SRPCA;
  else if (opt.algorithm == "fast-srpca") cfg.algorithm = SRPCA_ALG_FAST_SRPCA;
  else if (opt.algorithm == "svt") cfg.algorithm = SRPCA_ALG_SVT;
  else cfg.algorithm = SRPCA_ALG_ALS;
  cfg.rank = opt.rank;
  cfg.tol = opt.tol;
  cfg.lambda_ = opt.lambda;
  cfg.max_iter = opt.max_iter;
  cfg.seed = opt.seed;
  cfg.standardize = opt.no_standardize ? 0 : 1;
  cfg.svt_tau = opt.tau;
  cfg.svt_delta = opt.delta;
  cfg.svt_soft = opt.soft_threshold ? 1 : 0;
  return cfg;
}

MatrixPtr load_input(const CommonOptions& opt, int* maxval_out) {
  srpca_matrix* m = nullptr;
  srpca_status status = SRPCA_OK;
  if (opt.format == "csv") {
    status = srpca_matrix_load_csv(opt.input.c_str(), &m);
  } else if (opt.format == "pgm") {
    int32_t maxval = 255;
    status = srpca_matrix_load_pgm(
        opt.input.c_str(),
        opt.mask_path.empty() ? nullptr : opt.mask_path.c_str(), &maxval, &m);
    if (maxval_out != nullptr) *maxval_out = maxval;
  } else {
    status = srpca_matrix_load_movielens(opt.input.c_str(), nullptr, &m);
  }
  if (status != SRPCA_OK) die(status, "--input " + opt.input);
  return MatrixPtr(m);
}

void progress_to_stderr(int32_t iteration, double residual, void*) {
  std::fprintf(stderr, "iteration %" PRId32 " residual %.17g\n", iteration,
               residual);
}

void emit_report(const std::string& report_path, const nlohmann::json& j) {
  const std::string text = j.dump(2) + "\n";
  if (report_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(report_path);
  if (!out) {
    std::cerr << "error: --report " << report_path
              << ": cannot open for writing\n";
    std::exit(3);
  }
  out << text;
  if (!out) {
    std::cerr << "error: --report " << report_path << ": write failed\n";
    std::exit(3);
  }
}

nlohmann::json report_of(const srpca_result* result) {
  char* text = nullptr;
  const srpca_status status = srpca_result_report_json(result, &text);
  if (status != SRPCA_OK) die(status, "report");
  nlohmann::json j = nlohmann::json::parse(text);
  srpca_string_free(text);
  return j;
}

void write_matrix(const CommonOptions& opt, const srpca_matrix* input,
                  const srpca_result* result, int maxval) {
  if (opt.output.empty()) return;
  const int64_t rows = srpca_matrix_rows(input);
  const int64_t cols = srpca_matrix_cols(input);
  std::vector<double> values(static_cast<std::size_t>(rows * cols));
  srpca_status status = srpca_result_values(result, values.data());
  if (status != SRPCA_OK) die(status, "--output " + opt.output);
  srpca_matrix* dense = nullptr;
  status = srpca_matrix_create(rows, cols, values.data(), nullptr, &dense);
  if (status != SRPCA_OK) die(status, "--output " + opt.output);
  MatrixPtr holder(dense);
  status = opt.format == "pgm"
               ? srpca_matrix_save_pgm(dense, opt.output.c_str(), maxval)
               : srpca_matrix_save_csv(dense, opt.output.c_str());
  if (status != SRPCA_OK) die(status, "--output " + opt.output);
}

int run_complete(const CommonOptions& opt, double missing_frac) {
  int maxval = opt.maxval;
  MatrixPtr input = load_input(opt, &maxval);
  MatrixPtr working;
  const srpca_matrix* x = input.get();
  if (missing_frac > 0) {
    srpca_matrix* hidden = nullptr;
    const srpca_status status =
        srpca_matrix_mask_random(input.get(), missing_frac, opt.seed, &hidden);
    if (status != SRPCA_OK) die(status, "--missing-frac");
    working.reset(hidden);
    x = working.get();
  }

  const srpca_config cfg = build_config(opt);
  srpca_result* result = nullptr;
  const srpca_status status =
      srpca_complete(x, &cfg, progress_to_stderr, nullptr, &result);
  if (status != SRPCA_OK) die(status, "complete");
  ResultPtr holder(result);

  nlohmann::json report = report_of(result);
  report["input"] = opt.input;
  if (missing_frac > 0) report["missing_fraction"] = missing_frac;
  write_matrix(opt, x, result, maxval);
  emit_report(opt.report, report);
  return 0;
}

int run_holdout(const CommonOptions& opt, double missing_frac, bool clip,
                const std::string& truth_path) {
  int maxval = opt.maxval;
  MatrixPtr input = load_input(opt, &maxval);

  srpca_matrix* train_raw = nullptr;
  srpca_matrix* holdout_raw = nullptr;
  srpca_status status = srpca_matrix_holdout(input.get(), missing_frac,
                                             opt.seed, &train_raw,
                                             &holdout_raw);
  if (status != SRPCA_OK) die(status, "--missing-frac");
  MatrixPtr train(train_raw);
  MatrixPtr holdout(holdout_raw);

  const srpca_config cfg = build_config(opt);
  srpca_result* result = nullptr;
  status = srpca_complete(train.get(), &cfg, progress_to_stderr, nullptr,
                          &result);
  if (status != SRPCA_OK) die(status, "complete");
  ResultPtr holder(result);

  double score = 0;
  status = srpca_nmae(holdout.get(), result, train.get(), clip ? 1 : 0,
                      &score);
  if (status != SRPCA_OK) die(status, "nmae");

  nlohmann::json report = report_of(result);
  report["input"] = opt.input;
  report["holdout"] = {{"fraction", missing_frac},
                       {"held_out", srpca_matrix_observed_count(holdout.get())},
                       {"nmae", score},
                       {"clipped", clip}};

  if (!truth_path.empty()) {
    srpca_matrix* truth = nullptr;
    status = srpca_matrix_load_csv(truth_path.c_str(), &truth);
    if (status != SRPCA_OK) die(status, "--truth " + truth_path);
    MatrixPtr truth_holder(truth);
    const int64_t rows = srpca_matrix_rows(truth);
    const int64_t cols = srpca_matrix_cols(truth);
    if (rows != srpca_matrix_rows(input.get()) ||
        cols != srpca_matrix_cols(input.get())) {
      std::cerr << "error: --truth " << truth_path
                << ": dimensions do not match --input\n";
      return 2;
    }
    std::vector<double> predicted(static_cast<std::size_t>(rows * cols));
    std::vector<double> actual(predicted.size());
    if (srpca_result_values(result, predicted.data()) != SRPCA_OK ||
        srpca_matrix_values(truth, actual.data()) != SRPCA_OK)
      die(SRPCA_ERR_INTERNAL, "--truth " + truth_path);
    double full = 0;
    for (std::size_t k = 0; k < predicted.size(); ++k) {
      if (std::isnan(actual[k])) {
        std::cerr << "error: --truth " << truth_path
                  << ": ground truth must be fully observed\n";
        return 3;
      }
      const double d = predicted[k] - actual[k];
      full += d * d;
    }
    report["holdout"]["full_sq_error"] = full;
  }

  write_matrix(opt, train.get(), result, maxval);
  emit_report(opt.report, report);
  return 0;
}

int run_bench(const std::string& input, const std::string& report_path) {
  char* text = nullptr;
  const srpca_status status = srpca_bench_run_file(input.c_str(), &text);
  if (status != SRPCA_OK) die(status, "--input " + input);
  nlohmann::json j = nlohmann::json::parse(text);
  srpca_string_free(text);
  emit_report(report_path, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank matrix completion"};
  app.require_subcommand(1);

  CommonOptions complete_opt;
  double complete_missing = 0.0;
  CLI::App* cmd_complete =
      app.add_subcommand("complete", "Complete one dataset");
  add_io_flags(cmd_complete, complete_opt);
  add_algorithm_flags(cmd_complete, complete_opt);
  cmd_complete
      ->add_option("--missing-frac", complete_missing,
                   "Hide this fraction of the observed cells first")
      ->check(CLI::Range(0.0, 0.999999));

  CommonOptions holdout_opt;
  double holdout_missing = 0.5;
  bool holdout_clip = false;
  std::string truth_path;
  CLI::App* cmd_holdout = app.add_subcommand(
      "holdout", "Hold out observed cells, complete, and score the holdout");
  add_io_flags(cmd_holdout, holdout_opt);
  add_algorithm_flags(cmd_holdout, holdout_opt);
  cmd_holdout
      ->add_option("--missing-frac", holdout_missing,
                   "Fraction of observed cells to hold out")
      ->check(CLI::Range(0.000001, 0.999999));
  cmd_holdout->add_flag("--clip", holdout_clip,
                        "Clamp predictions into the training value range");
  cmd_holdout->add_option("--truth", truth_path,
                          "Fully observed ground truth (csv) for full error");

  std::string bench_input;
  std::string bench_report;
  CLI::App* cmd_bench =
      app.add_subcommand("bench", "Run a benchmark scenario file");
  cmd_bench->add_option("--input", bench_input, "Scenario JSON file")
      ->required();
  cmd_bench->add_option("--report", bench_report,
                        "Write the JSON report here (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_complete->parsed())
      return run_complete(complete_opt, complete_missing);
    if (cmd_holdout->parsed())
      return run_holdout(holdout_opt, holdout_missing, holdout_clip,
                         truth_path);
    return run_bench(bench_input, bench_report);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
