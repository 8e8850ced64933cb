// Run configuration (JSON), validation findings, the repeat/algorithm
// experiment loop, and the result writers used by the command line tool.

#ifndef SPMTL_EXPERIMENT_HPP_
#define SPMTL_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spmtl/data.hpp"
#include "spmtl/eval.hpp"
#include "spmtl/methods.hpp"

namespace spmtl {

// Malformed config document: bad JSON, wrong types, unknown keys.
class ConfigError : public Error {
 public:
  using Error::Error;
};

using ParameterList = std::vector<std::pair<std::string, double>>;

struct DatasetConfig {
  enum class Source { Syn1, Syn2, Csv };
  Source source = Source::Syn2;
  SynConfig syn;                // seed unused; derived per repeat
  std::filesystem::path path;   // csv only, resolved against the config's directory
  CsvSchema schema;
};

struct AlgorithmEntry {
  std::string name;
  std::optional<TauRule> tau_rule;
  ParameterList parameters;
};

struct CvConfig {
  int k = 3;
  std::optional<Grid> grid;  // default grid when absent
};

struct RunConfig {
  DatasetConfig dataset;
  std::vector<AlgorithmEntry> algorithms;
  ParameterList defaults;  // "pacing" block, applied before per-algorithm parameters
  SplitSpec split;         // seed is derived from `seed`
  std::optional<CvConfig> cv;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "results";
  std::optional<std::string> trajectory_algorithm;
  int jobs = 1;
};

RunConfig parse_run_config(const std::string& text,
                           const std::filesystem::path& base_dir = ".");
// Throws Error when the file cannot be read, ConfigError when malformed.
RunConfig load_run_config(const std::filesystem::path& path);

// Human-readable constraint violations, one per entry; empty means valid.
std::vector<std::string> validate_config(const RunConfig& cfg);

// Log-spaced defaults for the parameters that apply to `method`: gamma in
// 1e-3..1e2, lambda0_scale in 1e-2..1e2, h in {2, ceil(d/4), ceil(d/2)}.
Grid default_grid(const Method& method, Index d);

// The method for one config entry, with defaults and overrides applied.
Method resolve_method(const RunConfig& cfg, const AlgorithmEntry& entry, Index d);

struct AlgorithmOutcome {
  Vector metric;  // per task, on the test split
  std::vector<TauRecord> tau_history;
  std::vector<double> lambda_schedule;
  int iterations = 0;
  bool converged = false;
  ParameterList selected;  // CV choice
  std::vector<std::string> warnings;
};

struct RepeatOutcome {
  std::vector<int> task_ids;
  Metric metric = Metric::RMSE;
  std::vector<AlgorithmOutcome> algorithms;  // config order
};

struct AlgorithmSummary {
  std::string name;
  RunSummary summary;
  std::optional<std::string> baseline;
  double p_value = 0.0;  // NaN without a baseline in the run
};

struct ExperimentResult {
  Metric metric = Metric::RMSE;
  std::vector<int> task_ids;
  std::vector<std::string> algorithm_names;
  std::vector<RepeatOutcome> repeats;
  std::vector<AlgorithmSummary> summaries;
  std::optional<std::string> trajectory_algorithm;
};

// Repeats run concurrently up to cfg.jobs; each fills its own slot and the
// summaries are computed serially afterwards. Throws the error of the
// lowest failing repeat.
ExperimentResult run_experiment(const RunConfig& cfg);

// results.json, tau_trajectory.csv, tau_trajectory_<name>.csv,
// per_task_errors.csv.
void write_results(const ExperimentResult& result, const RunConfig& cfg,
                   const std::filesystem::path& dir);

// 17 significant digits.
std::string format_number(double x);

}  // namespace spmtl

#endif  // SPMTL_EXPERIMENT_HPP_
