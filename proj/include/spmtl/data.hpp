// Synthetic task generators, the CSV loader, and seeded train/test and
// k-fold splitters.

#ifndef SPMTL_DATA_HPP_
#define SPMTL_DATA_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spmtl/types.hpp"

namespace spmtl {

class ParseError : public Error {
 public:
  ParseError(const std::string& path, long line, const std::string& what);
  long line() const { return line_; }

 private:
  long line_;
};

struct SynConfig {
  std::uint64_t seed = 0;
  int n_tasks = 30;
  int n_per_task = 15;       // training examples per task
  int n_test_per_task = 100; // extra held-out rows generated per task
  int d = 20;
  // syn1 only
  int n_groups = 3;
  int group_rank = 4;
  double sigma_easy = 5.0;
  double sigma_hard = 25.0;
  double hard_fraction = 1.0 / 3.0;
  // syn2 only
  double sigma = 1.0;

  static SynConfig syn1(std::uint64_t seed);
  static SynConfig syn2(std::uint64_t seed);
};

void check_invariants(const SynConfig& cfg, bool syn2);

// A generated dataset with its ground truth.
struct SyntheticData {
  MultitaskDataset data;
  Matrix true_W;              // d x T
  Vector noise_sigma;         // per task
  std::vector<int> group;     // syn1 group of each task; empty for syn2
  Vector shared_s;            // syn2 draw (s_1..s_d); empty for syn1
};

// Three groups of tasks; each task parameter is a random combination of its
// group's rank-`group_rank` basis. A seeded subset of round(hard_fraction*T)
// tasks gets noise sigma_hard, the rest sigma_easy.
SyntheticData generate_syn1(const SynConfig& cfg);

// w_t = (s_1, ..., s_t, 0, ..., 0) for one shared standard-normal draw s.
SyntheticData generate_syn2(const SynConfig& cfg);

struct CsvSchema {
  std::string task_column;
  std::string target_column;
  TaskKind kind = TaskKind::Regression;
  std::vector<std::string> categorical_columns;
  bool add_bias = false;
};

// Rows are grouped by task id (tasks ordered by first appearance). Every
// column other than task and target is a feature; categorical columns
// expand in place to one indicator per observed level, in first-occurrence
// order. The bias column, when requested, is appended last.
MultitaskDataset load_csv_dataset(const std::filesystem::path& path, const CsvSchema& schema);

// Same, from an in-memory document. `source` names it in error messages.
MultitaskDataset parse_csv_dataset(const std::string& text, const CsvSchema& schema,
                                   const std::string& source = "<memory>");

// Writes the ingestion format: task,y,x1..xd with 17 significant digits.
void write_csv_dataset(const MultitaskDataset& data, const std::filesystem::path& path);

struct SplitSpec {
  std::optional<double> train_fraction;
  std::optional<int> train_count;
  bool stratified = false;
  int n_repeats = 1;
  std::uint64_t seed = 0;
};

struct DataSplit {
  MultitaskDataset train;
  MultitaskDataset test;
};

// n_repeats independent splits; each task is split on its own.
std::vector<DataSplit> split(const MultitaskDataset& data, const SplitSpec& spec);

// One repeat of `split`, keyed by (seed, repeat).
DataSplit split_once(const MultitaskDataset& data, const SplitSpec& spec, int repeat);

// Per-task k-fold partition; element f holds (train, validation) for fold f.
std::vector<DataSplit> kfold(const MultitaskDataset& data, int k, std::uint64_t seed);

// The rows `rows` of every task (same order as `rows[t]`).
MultitaskDataset select_rows(const MultitaskDataset& data,
                             const std::vector<std::vector<Index>>& rows);

}  // namespace spmtl

#endif  // SPMTL_DATA_HPP_
