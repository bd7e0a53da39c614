#include <doctest.h>

#include <cmath>
#include <string>

#include "oracles.hpp"
#include "srpca/bench.hpp"
#include "srpca/completion.hpp"
#include "srpca/io.hpp"

using namespace srpca;
using nlohmann::json;

namespace {

BenchmarkScenario tiny_scenario() {
  BenchmarkScenario s;
  s.name = "tiny";
  s.rows = 24;
  s.cols = 18;
  s.true_rank = 2;
  s.missing_fractions = {0.3};
  s.replications = 1;
  s.base_seed = 5;
  CompletionConfig cfg;
  cfg.rank = 2;
  cfg.tol = 1e-6;
  cfg.standardize = false;
  s.configs.push_back(cfg);
  return s;
}

// Wall-clock fields are the only nondeterministic part of a report.
void strip_wall_times(json& report) {
  for (auto& cell : report["cells"]) cell.erase("wall_seconds");
  for (auto& row : report["summary"]) row.erase("mean_wall_seconds");
}

}  // namespace

TEST_CASE("completion configs survive a JSON round-trip") {
  CompletionConfig cfg;
  cfg.algorithm = Algorithm::fast_srpca;
  cfg.rank = 7;
  cfg.tol = 3e-5;
  cfg.lambda = 0.25;
  cfg.max_iter = 123;
  cfg.seed = 99;
  cfg.standardize = false;
  cfg.ridge = 1e-7;
  cfg.svt_tau = 42.0;
  cfg.svt_delta = 1.5;
  cfg.svt_soft = true;

  const CompletionConfig back = config_from_json(config_to_json(cfg));
  CHECK(back.algorithm == cfg.algorithm);
  CHECK(back.rank == cfg.rank);
  CHECK(back.tol == cfg.tol);
  CHECK(back.lambda == cfg.lambda);
  CHECK(back.max_iter == cfg.max_iter);
  CHECK(back.seed == cfg.seed);
  CHECK(back.standardize == cfg.standardize);
  CHECK(back.ridge == cfg.ridge);
  CHECK(back.svt_tau == cfg.svt_tau);
  CHECK(back.svt_delta == cfg.svt_delta);
  CHECK(back.svt_soft == cfg.svt_soft);
}

TEST_CASE("config parsing rejects unknown algorithms") {
  CHECK_THROWS_AS(config_from_json(json{{"algorithm", "pca"}}),
                  std::invalid_argument);
}

TEST_CASE("scenarios parse from JSON with defaults applied") {
  const json j = {
      {"name", "demo"},
      {"generator", "synthetic_lowrank"},
      {"rows", 40},
      {"cols", 30},
      {"true_rank", 3},
      {"missing_fractions", {0.2, 0.5}},
      {"replications", 2},
      {"base_seed", 11},
      {"configs", {{{"algorithm", "srpca"}, {"rank", 3}}}},
  };
  const BenchmarkScenario s = scenario_from_json(j);
  CHECK(s.name == "demo");
  CHECK(s.rows == 40);
  CHECK(s.cols == 30);
  CHECK(s.true_rank == 3);
  CHECK(s.missing_fractions == std::vector<double>{0.2, 0.5});
  CHECK(s.replications == 2);
  CHECK(s.base_seed == 11);
  REQUIRE(s.configs.size() == 1);
  CHECK(s.configs[0].algorithm == Algorithm::srpca);
  CHECK(s.configs[0].rank == 3);
  CHECK(s.configs[0].tol == 1e-4);
}

TEST_CASE("scenario validation rejects malformed inputs") {
  BenchmarkScenario s = tiny_scenario();
  s.replications = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  s = tiny_scenario();
  s.missing_fractions = {1.0};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  s = tiny_scenario();
  s.configs.clear();
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  s = tiny_scenario();
  s.generator = BenchGenerator::csv_file;
  s.path.clear();
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  CHECK_THROWS_AS(scenario_from_json(json{{"generator", "tarot"}}),
                  std::invalid_argument);
}

TEST_CASE("synthetic ground truth matches the reference generator") {
  const Matrix lib = synthetic_lowrank(12, 9, 2, 77);
  const Matrix ref = oracle::lowrank_matrix(12, 9, 2, 77);
  CHECK((lib - ref).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(synthetic_lowrank(0, 3, 1, 0), std::invalid_argument);
}

TEST_CASE("bench_run emits one cell per fraction, replication, and config") {
  BenchmarkScenario s = tiny_scenario();
  s.replications = 1;
  CompletionConfig als = s.configs[0];
  als.algorithm = Algorithm::als;
  s.configs.push_back(als);

  const json report = bench_run(s);
  CHECK(report["cells"].size() == 2);
  CHECK(report["summary"].size() == 2);
  CHECK(report["cells"][0]["algorithm"] == "srpca");
  CHECK(report["cells"][1]["algorithm"] == "als");
  for (const auto& row : report["summary"]) {
    CHECK(row["completed"] == 1);
    CHECK(row["failed"] == 0);
  }
}

TEST_CASE("bench_run seeds cells by fraction index and replication") {
  BenchmarkScenario s = tiny_scenario();
  s.missing_fractions = {0.2, 0.4};
  s.replications = 2;
  const json report = bench_run(s);
  REQUIRE(report["cells"].size() == 4);
  CHECK(report["cells"][0]["seed"] == 5);
  CHECK(report["cells"][1]["seed"] == 6);
  CHECK(report["cells"][2]["seed"] == 5 + 7919);
  CHECK(report["cells"][3]["seed"] == 5 + 7919 + 1);
}

TEST_CASE("bench_run is deterministic apart from wall times") {
  const BenchmarkScenario s = tiny_scenario();
  json first = bench_run(s);
  json second = bench_run(s);
  strip_wall_times(first);
  strip_wall_times(second);
  CHECK(first == second);
}

TEST_CASE("a failing cell is recorded without stopping the run") {
  BenchmarkScenario s = tiny_scenario();
  CompletionConfig svt = s.configs[0];
  svt.algorithm = Algorithm::svt;
  svt.svt_delta = 50.0;  // guaranteed divergence
  s.configs.push_back(svt);

  const json report = bench_run(s);
  REQUIRE(report["cells"].size() == 2);
  CHECK_FALSE(report["cells"][0].contains("error"));
  CHECK(report["cells"][0].contains("relative_error"));
  REQUIRE(report["cells"][1].contains("error"));
  const std::string message = report["cells"][1]["error"];
  CHECK(message.find("diverged") != std::string::npos);
  CHECK(report["summary"][1]["completed"] == 0);
  CHECK(report["summary"][1]["failed"] == 1);
}

TEST_CASE("a five-replication synthetic run recovers the ground truth") {
  BenchmarkScenario s;
  s.name = "recovery";
  s.rows = 200;
  s.cols = 100;
  s.true_rank = 3;
  s.missing_fractions = {0.5};
  s.replications = 5;
  s.base_seed = 20;
  CompletionConfig cfg;
  cfg.rank = 3;
  cfg.tol = 1e-8;
  cfg.standardize = false;
  s.configs.push_back(cfg);

  const json report = bench_run(s);
  REQUIRE(report["cells"].size() == 5);
  for (const auto& cell : report["cells"]) {
    REQUIRE_FALSE(cell.contains("error"));
    CHECK(cell["relative_error"].get<double>() < 1e-3);
    CHECK(cell["iterations"].get<int>() < cell["bound"].get<std::int64_t>());
  }
  CHECK(report["summary"][0]["completed"] == 5);
  CHECK(report["summary"][0]["mean_error"].get<double>() < 1e-3);
}

TEST_CASE("file-backed cells hold out observed entries and report nmae") {
  const Matrix truth = oracle::lowrank_matrix(30, 20, 1, 404);
  BenchmarkScenario s;
  s.generator = BenchGenerator::csv_file;
  s.missing_fractions = {0.4};
  s.replications = 2;
  s.base_seed = 9;
  CompletionConfig cfg;
  cfg.rank = 1;
  cfg.tol = 1e-8;
  cfg.standardize = false;
  s.configs.push_back(cfg);

  const std::string path = "/tmp/srpca_bench_input.csv";
  save_csv(path, truth);
  s.path = path;

  const json report = bench_run(s);
  CHECK(report["scenario"]["dataset"]["rows"] == 30);
  CHECK(report["scenario"]["dataset"]["observed"] == 600);
  REQUIRE(report["cells"].size() == 2);
  for (const auto& cell : report["cells"]) {
    REQUIRE_FALSE(cell.contains("error"));
    REQUIRE(cell.contains("nmae"));
    CHECK(cell["nmae"].get<double>() < 0.05);
  }
}
