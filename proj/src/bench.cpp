#include "srpca/bench.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "srpca/completion.hpp"
#include "srpca/io.hpp"
#include "srpca/metrics.hpp"
#include "srpca/observation.hpp"
#include "srpca/rng.hpp"

namespace srpca {
namespace {

// Offset separating the mask stream from the ground-truth stream within one
// benchmark cell.
constexpr std::uint64_t kMaskSeedOffset = 1000003;

const char* generator_name(BenchGenerator g) {
  switch (g) {
    case BenchGenerator::synthetic_lowrank: return "synthetic_lowrank";
    case BenchGenerator::image_file: return "image_file";
    case BenchGenerator::csv_file: return "csv_file";
    case BenchGenerator::movielens: return "movielens";
  }
  return "unknown";
}

BenchGenerator generator_from_name(const std::string& name) {
  if (name == "synthetic_lowrank") return BenchGenerator::synthetic_lowrank;
  if (name == "image_file") return BenchGenerator::image_file;
  if (name == "csv_file") return BenchGenerator::csv_file;
  if (name == "movielens") return BenchGenerator::movielens;
  throw std::invalid_argument("scenario: unknown generator '" + name + "'");
}

}  // namespace

void BenchmarkScenario::validate() const {
  if (replications < 1)
    throw std::invalid_argument("scenario: replications must be >= 1");
  if (missing_fractions.empty())
    throw std::invalid_argument("scenario: no missing fractions");
  for (double f : missing_fractions)
    if (f < 0 || f >= 1)
      throw std::invalid_argument("scenario: fractions must be in [0, 1)");
  if (configs.empty())
    throw std::invalid_argument("scenario: no algorithm configs");
  if (generator == BenchGenerator::synthetic_lowrank) {
    if (rows < 1 || cols < 1)
      throw std::invalid_argument("scenario: synthetic dims must be positive");
    if (true_rank < 1)
      throw std::invalid_argument("scenario: true_rank must be >= 1");
  } else if (path.empty()) {
    throw std::invalid_argument("scenario: file generator needs a path");
  }
  for (const CompletionConfig& cfg : configs) cfg.validate();
}

nlohmann::json config_to_json(const CompletionConfig& cfg) {
  return nlohmann::json{{"algorithm", to_string(cfg.algorithm)},
                        {"rank", cfg.rank},
                        {"tol", cfg.tol},
                        {"lambda", cfg.lambda},
                        {"max_iter", cfg.max_iter},
                        {"seed", cfg.seed},
                        {"standardize", cfg.standardize},
                        {"ridge", cfg.ridge},
                        {"svt_tau", cfg.svt_tau},
                        {"svt_delta", cfg.svt_delta},
                        {"svt_soft", cfg.svt_soft}};
}

CompletionConfig config_from_json(const nlohmann::json& j) {
  CompletionConfig cfg;
  if (j.contains("algorithm")) {
    const std::string name = j.at("algorithm").get<std::string>();
    const auto alg = algorithm_from_string(name);
    if (!alg)
      throw std::invalid_argument("config: unknown algorithm '" + name + "'");
    cfg.algorithm = *alg;
  }
  if (j.contains("rank")) cfg.rank = j.at("rank").get<Index>();
  if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
  if (j.contains("lambda")) cfg.lambda = j.at("lambda").get<double>();
  if (j.contains("max_iter")) cfg.max_iter = j.at("max_iter").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("standardize"))
    cfg.standardize = j.at("standardize").get<bool>();
  if (j.contains("ridge")) cfg.ridge = j.at("ridge").get<double>();
  if (j.contains("svt_tau")) cfg.svt_tau = j.at("svt_tau").get<double>();
  if (j.contains("svt_delta")) cfg.svt_delta = j.at("svt_delta").get<double>();
  if (j.contains("svt_soft")) cfg.svt_soft = j.at("svt_soft").get<bool>();
  cfg.validate();
  return cfg;
}

BenchmarkScenario scenario_from_json(const nlohmann::json& j) {
  BenchmarkScenario s;
  if (j.contains("name")) s.name = j.at("name").get<std::string>();
  if (j.contains("generator"))
    s.generator = generator_from_name(j.at("generator").get<std::string>());
  if (j.contains("path")) s.path = j.at("path").get<std::string>();
  if (j.contains("rows")) s.rows = j.at("rows").get<Index>();
  if (j.contains("cols")) s.cols = j.at("cols").get<Index>();
  if (j.contains("true_rank")) s.true_rank = j.at("true_rank").get<int>();
  if (j.contains("missing_fractions"))
    s.missing_fractions =
        j.at("missing_fractions").get<std::vector<double>>();
  if (j.contains("replications"))
    s.replications = j.at("replications").get<int>();
  if (j.contains("base_seed"))
    s.base_seed = j.at("base_seed").get<std::uint64_t>();
  if (j.contains("configs"))
    for (const auto& c : j.at("configs"))
      s.configs.push_back(config_from_json(c));
  s.validate();
  return s;
}

BenchmarkScenario scenario_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open for reading");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return scenario_from_json(j);
}

Matrix synthetic_lowrank(Index rows, Index cols, int rank, std::uint64_t seed) {
  if (rows < 1 || cols < 1 || rank < 1)
    throw std::invalid_argument("synthetic_lowrank: bad dimensions");
  Rng rng(seed);
  Matrix a(rows, rank);
  for (Index j = 0; j < rank; ++j)
    for (Index i = 0; i < rows; ++i) a(i, j) = rng.normal();
  Matrix b(rank, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rank; ++i) b(i, j) = rng.normal();
  return a * b;
}

nlohmann::json bench_run(const BenchmarkScenario& scenario) {
  scenario.validate();

  const bool synthetic = scenario.generator == BenchGenerator::synthetic_lowrank;
  ObservedMatrix loaded;
  if (!synthetic) {
    switch (scenario.generator) {
      case BenchGenerator::image_file:
        loaded = load_pgm(scenario.path).data;
        break;
      case BenchGenerator::csv_file:
        loaded = load_csv(scenario.path);
        break;
      case BenchGenerator::movielens:
        loaded = load_movielens(scenario.path).matrix;
        break;
      default:
        break;
    }
  }

  nlohmann::json report;
  report["scenario"] = {
      {"name", scenario.name},
      {"generator", generator_name(scenario.generator)},
      {"replications", scenario.replications},
      {"missing_fractions", scenario.missing_fractions},
      {"base_seed", scenario.base_seed},
  };
  if (synthetic) {
    report["scenario"]["rows"] = scenario.rows;
    report["scenario"]["cols"] = scenario.cols;
    report["scenario"]["true_rank"] = scenario.true_rank;
  } else {
    report["scenario"]["path"] = scenario.path;
    report["scenario"]["dataset"] = {
        {"rows", loaded.rows()},
        {"cols", loaded.cols()},
        {"observed", loaded.observed_count()},
        {"fingerprint", fingerprint(loaded)},
    };
  }
  nlohmann::json configs_echo = nlohmann::json::array();
  for (const CompletionConfig& cfg : scenario.configs)
    configs_echo.push_back(config_to_json(cfg));
  report["scenario"]["configs"] = configs_echo;

  nlohmann::json cells = nlohmann::json::array();
  // error_sink[config][fraction] collects the per-replication headline error
  // for the summary.
  std::vector<std::vector<std::vector<double>>> error_sink(
      scenario.configs.size(),
      std::vector<std::vector<double>>(scenario.missing_fractions.size()));
  std::vector<std::vector<std::vector<double>>> wall_sink = error_sink;
  std::vector<std::vector<std::vector<double>>> iter_sink = error_sink;

  for (std::size_t fi = 0; fi < scenario.missing_fractions.size(); ++fi) {
    const double fraction = scenario.missing_fractions[fi];
    for (int rep = 0; rep < scenario.replications; ++rep) {
      const std::uint64_t cell_seed =
          scenario.base_seed + 7919 * static_cast<std::uint64_t>(fi) +
          static_cast<std::uint64_t>(rep);

      Matrix truth;
      ObservedMatrix train;
      ObservedMatrix holdout;
      if (synthetic) {
        truth = synthetic_lowrank(scenario.rows, scenario.cols,
                                  scenario.true_rank, cell_seed);
        train.values = truth;
        train.mask = random_mask(scenario.rows, scenario.cols, fraction,
                                 cell_seed + kMaskSeedOffset);
      } else {
        HoldoutSplit split =
            holdout_split(loaded, fraction, cell_seed + kMaskSeedOffset);
        train = std::move(split.train);
        holdout = std::move(split.holdout);
      }

      for (std::size_t ci = 0; ci < scenario.configs.size(); ++ci) {
        CompletionConfig cfg = scenario.configs[ci];
        cfg.seed = cell_seed;
        nlohmann::json cell = {
            {"fraction", fraction},
            {"replication", rep},
            {"seed", cell_seed},
            {"config_index", ci},
            {"algorithm", to_string(cfg.algorithm)},
            {"train_fingerprint", fingerprint(train)},
        };
        try {
          const CompletionResult result = complete(train, cfg);
          const MetricReport metrics =
              make_report(train, result, cfg, synthetic ? &truth : nullptr,
                          holdout.observed_count() > 0 ? &holdout : nullptr);
          cell["iterations"] = metrics.iterations;
          cell["termination"] = metrics.termination;
          cell["observed_sq_residual"] = metrics.observed_sq_residual;
          cell["observed_sq_residual_std"] = metrics.observed_sq_residual_std;
          cell["bound"] = metrics.bound;
          cell["wall_seconds"] = metrics.wall_seconds;
          double headline = 0;
          if (metrics.full_sq_error) {
            cell["full_sq_error"] = *metrics.full_sq_error;
            const double rel =
                std::sqrt(*metrics.full_sq_error) / truth.norm();
            cell["relative_error"] = rel;
            headline = rel;
          }
          if (metrics.nmae_value) {
            cell["nmae"] = *metrics.nmae_value;
            headline = *metrics.nmae_value;
          }
          error_sink[ci][fi].push_back(headline);
          wall_sink[ci][fi].push_back(metrics.wall_seconds);
          iter_sink[ci][fi].push_back(static_cast<double>(metrics.iterations));
        } catch (const std::exception& e) {
          cell["error"] = e.what();
        }
        cells.push_back(std::move(cell));
      }
    }
  }
  report["cells"] = std::move(cells);

  const auto mean_of = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  };
  const auto std_of = [&mean_of](const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const double mu = mean_of(v);
    double s = 0;
    for (double x : v) s += (x - mu) * (x - mu);
    return std::sqrt(s / static_cast<double>(v.size()));
  };

  nlohmann::json summary = nlohmann::json::array();
  for (std::size_t ci = 0; ci < scenario.configs.size(); ++ci)
    for (std::size_t fi = 0; fi < scenario.missing_fractions.size(); ++fi) {
      const auto& errors = error_sink[ci][fi];
      summary.push_back(
          {{"config_index", ci},
           {"algorithm", to_string(scenario.configs[ci].algorithm)},
           {"fraction", scenario.missing_fractions[fi]},
           {"completed", errors.size()},
           {"failed",
            static_cast<std::size_t>(scenario.replications) - errors.size()},
           {"mean_error", mean_of(errors)},
           {"std_error", std_of(errors)},
           {"mean_iterations", mean_of(iter_sink[ci][fi])},
           {"mean_wall_seconds", mean_of(wall_sink[ci][fi])}});
    }
  report["summary"] = std::move(summary);
  return report;
}

}  // namespace srpca
