// Metrics, hyperparameter selection by k-fold cross validation, and
// aggregation of repeated runs.

#ifndef SPMTL_EVAL_HPP_
#define SPMTL_EVAL_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "spmtl/methods.hpp"
#include "spmtl/types.hpp"

namespace spmtl {

enum class Metric { RMSE, AUC };

const char* metric_name(Metric m);

double rmse(const Vector& y_true, const Vector& y_pred);

// Mann-Whitney statistic P(s+ > s-) + 0.5 P(s+ = s-), via average ranks.
double auc(const Vector& labels, const Vector& scores);

// RMSE for regression data, AUC for classification; mixed kinds throw.
Metric metric_for(const MultitaskDataset& data);

// Lower is better for RMSE, higher for AUC.
bool better(Metric m, double a, double b);

// Per-task metric on held-out data. A task whose test labels hold a single
// class yields NaN under AUC.
Vector evaluate(const ModelParams& W, const MultitaskDataset& test, Metric metric);

// Mean over the finite entries.
double finite_mean(const Vector& v);

struct RunSummary {
  Vector per_task_metric;
  double mean = 0.0;
  double std_error = 0.0;  // sample std of run means / sqrt(n_runs); 0 when n_runs = 1
  Metric metric = Metric::RMSE;
  int n_runs = 0;
  std::vector<double> run_means;
};

RunSummary aggregate_runs(const std::vector<Vector>& per_run_metrics, Metric metric = Metric::RMSE);

// Two-sided paired t-test; returns the p-value. Identical samples give 1.
double paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

struct GridAxis {
  std::string name;
  std::vector<double> values;
};
using Grid = std::vector<GridAxis>;

struct GridPointScore {
  std::vector<double> values;  // one per axis
  double mean_metric = 0.0;
  bool failed = false;
};

struct CrossValidationResult {
  Method best;
  std::size_t best_index = 0;
  std::vector<GridPointScore> scores;  // grid order, first axis slowest
  std::vector<std::string> warnings;
};

// Each grid point is scored by the mean over folds of the fold's mean
// per-task validation metric. Ties keep the earliest point. Points that
// throw on any fold are skipped with a warning.
CrossValidationResult cross_validate(const MultitaskDataset& data, const Method& method,
                                     const Grid& grid, int k, std::uint64_t seed);

}  // namespace spmtl

#endif  // SPMTL_EVAL_HPP_
