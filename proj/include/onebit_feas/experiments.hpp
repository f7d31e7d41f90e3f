#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "onebit_feas/error.hpp"
#include "onebit_feas/qcs.hpp"
#include "onebit_feas/solvers.hpp"

namespace obf {

enum class ExperimentKind { Fig1, Fig2, Fig3, Table1 };

std::string_view to_string(ExperimentKind kind);
std::string_view to_string(EnsembleKind kind);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Fig1;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t m = 0;
  std::vector<std::size_t> m1;
  EnsembleKind kind = EnsembleKind::RankOne;
  std::size_t trials = 1;
  std::vector<Algorithm> solvers;
  double lambda = 1.0;
  std::size_t gamma = 0;
  std::size_t k_prime = 0;
  std::size_t max_iters = 1000;
  double tol_margin = 1e-9;
  std::optional<double> tol_nmse;
  std::optional<double> dynamic_range;
  double nmse_target = 5e-5;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::size_t log_stride = 10;
  bool record_timing = true;
  bool dump_instances = false;

  SolverConfig solver_config(Algorithm algorithm, std::uint64_t solver_seed) const;
};

/// Raised with every violation found in a config, not just the first.
class ConfigError : public Error {
 public:
  ConfigError(ErrorCode code, std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

ExperimentConfig parse_config(const nlohmann::json& j);
/// Reads and validates a JSON config file.
ExperimentConfig validate_config(const std::filesystem::path& path);
/// Every field with defaults resolved, in a fixed key order.
nlohmann::ordered_json to_json(const ExperimentConfig& cfg);
std::string canonical_config(const ExperimentConfig& cfg);

struct RunOptions {
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
};

struct Table1Result {
  std::size_t samples = 0;
  double cpu_seconds = 0.0;
  double nmse = 0.0;
  bool converged = false;
};

struct RunSummary {
  std::filesystem::path output_dir;
  std::vector<std::filesystem::path> files;
  std::optional<Table1Result> table1;
  /// 0 on success, 3 when the Table 1 criterion was not met.
  int exit_code = 0;
};

/// Seed of trial t: derive_seed(master, {trial tag, t}).
std::uint64_t trial_seed(std::uint64_t master, std::size_t trial);

/// Rank-one m1 sweep with Block SKM. Writes trace_m1_<m1>_trial_<t>.csv,
/// nmse_vs_iter_m1.csv (m1,iter,mean_nmse) and final_nmse.csv.
RunSummary run_fig1(const ExperimentConfig& cfg, const RunOptions& opts = {});
/// Same protocol with full-rank ensembles.
RunSummary run_fig2(const ExperimentConfig& cfg, const RunOptions& opts = {});
/// RKA / SKM / Block SKM on one-bit linear systems. Writes
/// fig3_<solver>.csv (iter,mean_nmse), per-trial traces and fig3_final.csv.
RunSummary run_fig3(const ExperimentConfig& cfg, const RunOptions& opts = {});
/// Block SKM until signal NMSE <= nmse_target. Writes table1.json.
RunSummary run_table1(const ExperimentConfig& cfg, const RunOptions& opts = {});
RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Mean over traces of err_sq / ref_sq on the union of logged iterations. A
/// trace contributes its latest record at or before each grid iteration.
struct AggregatePoint {
  std::size_t iter = 0;
  double mean_nmse = 0.0;
};
std::vector<AggregatePoint> aggregate_traces(const std::vector<const SolverTrace*>& traces,
                                             const std::vector<double>& ref_sq);

}  // namespace obf
