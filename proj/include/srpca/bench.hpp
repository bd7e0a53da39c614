#ifndef SRPCA_BENCH_HPP
#define SRPCA_BENCH_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "srpca/types.hpp"

namespace srpca {

enum class BenchGenerator { synthetic_lowrank, image_file, csv_file, movielens };

struct BenchmarkScenario {
  std::string name;
  BenchGenerator generator = BenchGenerator::synthetic_lowrank;
  std::string path;   // file-backed generators
  Index rows = 0;     // synthetic
  Index cols = 0;     // synthetic
  int true_rank = 0;  // synthetic
  std::vector<double> missing_fractions;
  int replications = 1;
  std::uint64_t base_seed = 0;
  std::vector<CompletionConfig> configs;

  void validate() const;
};

nlohmann::json config_to_json(const CompletionConfig& cfg);
CompletionConfig config_from_json(const nlohmann::json& j);

BenchmarkScenario scenario_from_json(const nlohmann::json& j);
BenchmarkScenario scenario_from_file(const std::string& path);

// Ground truth for synthetic cells: product of two seeded standard-normal
// factors, rows x true_rank times true_rank x cols.
Matrix synthetic_lowrank(Index rows, Index cols, int rank, std::uint64_t seed);

// Runs every (missing fraction, replication, config) cell of the scenario.
// Synthetic cells mask a fresh ground-truth matrix and report the relative
// full-matrix error; file-backed cells hold out a fraction of the observed
// cells and report NMAE. The replication seed is
//   base_seed + 7919 * fraction_index + replication
// so cells are reproducible independently of execution order. A cell that
// throws is recorded with its error message; the other cells still run.
// The report carries the scenario echo, per-cell metrics, and per-config
// mean/std summaries.
nlohmann::json bench_run(const BenchmarkScenario& scenario);

}  // namespace srpca

#endif
