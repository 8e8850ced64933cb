#include "spmtl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "spmtl/data.hpp"
#include "spmtl/trainer.hpp"

namespace spmtl {

const char* metric_name(Metric m) { return m == Metric::RMSE ? "rmse" : "auc"; }

double rmse(const Vector& y_true, const Vector& y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw DimensionError("rmse: length mismatch");
  }
  if (y_true.size() == 0) throw InvalidArgument("rmse: empty input");
  return std::sqrt((y_true - y_pred).squaredNorm() / static_cast<double>(y_true.size()));
}

double auc(const Vector& labels, const Vector& scores) {
  if (labels.size() != scores.size()) throw DimensionError("auc: length mismatch");
  const Index n = labels.size();
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::sort(idx.begin(), idx.end(), [&](Index a, Index b) { return scores[a] < scores[b]; });

  double rank_sum_pos = 0.0;
  Index n_pos = 0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    // Ranks i+1 .. j+1 share their average.
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t m = i; m <= j; ++m) {
      if (labels[idx[m]] > 0.0) {
        rank_sum_pos += avg_rank;
        ++n_pos;
      }
    }
    i = j + 1;
  }
  const Index n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw InvalidArgument("auc: both classes must be present");
  const double np = static_cast<double>(n_pos);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

Metric metric_for(const MultitaskDataset& data) {
  const TaskKind kind = data[0].kind;
  for (const auto& task : data.tasks()) {
    if (task.kind != kind) throw InvalidArgument("dataset mixes regression and classification tasks");
  }
  return kind == TaskKind::Regression ? Metric::RMSE : Metric::AUC;
}

bool better(Metric m, double a, double b) { return m == Metric::RMSE ? a < b : a > b; }

Vector evaluate(const ModelParams& W, const MultitaskDataset& test, Metric metric) {
  const std::vector<Vector> preds = predict(W, test);
  Vector out(test.num_tasks());
  for (std::size_t t = 0; t < preds.size(); ++t) {
    const auto ti = static_cast<Index>(t);
    if (metric == Metric::RMSE) {
      out[ti] = rmse(test[t].y, preds[t]);
    } else {
      const bool has_pos = (test[t].y.array() > 0.0).any();
      const bool has_neg = (test[t].y.array() < 0.0).any();
      out[ti] = has_pos && has_neg ? auc(test[t].y, preds[t])
                                   : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

double finite_mean(const Vector& v) {
  double sum = 0.0;
  Index n = 0;
  for (Index i = 0; i < v.size(); ++i) {
    if (std::isfinite(v[i])) {
      sum += v[i];
      ++n;
    }
  }
  return n > 0 ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

RunSummary aggregate_runs(const std::vector<Vector>& per_run_metrics, Metric metric) {
  if (per_run_metrics.empty()) throw InvalidArgument("aggregate_runs: no runs");
  const Index T = per_run_metrics.front().size();
  for (const auto& run : per_run_metrics) {
    if (run.size() != T) throw DimensionError("aggregate_runs: runs have different task counts");
  }
  RunSummary s;
  s.metric = metric;
  s.n_runs = static_cast<int>(per_run_metrics.size());
  s.per_task_metric = Vector::Zero(T);
  for (Index t = 0; t < T; ++t) {
    Vector col(s.n_runs);
    for (int r = 0; r < s.n_runs; ++r) col[r] = per_run_metrics[static_cast<std::size_t>(r)][t];
    s.per_task_metric[t] = finite_mean(col);
  }
  for (const auto& run : per_run_metrics) s.run_means.push_back(finite_mean(run));
  const double n = static_cast<double>(s.n_runs);
  s.mean = std::accumulate(s.run_means.begin(), s.run_means.end(), 0.0) / n;
  if (s.n_runs > 1) {
    double ss = 0.0;
    for (double m : s.run_means) ss += (m - s.mean) * (m - s.mean);
    s.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return s;
}

double paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw DimensionError("paired_t_test: sample sizes differ");
  const std::size_t n = a.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = a[i] - b[i] - mean;
    ss += dev * dev;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0.0) return mean == 0.0 ? 1.0 : 0.0;
  const double t = mean / (sd / std::sqrt(static_cast<double>(n)));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

CrossValidationResult cross_validate(const MultitaskDataset& data, const Method& method,
                                     const Grid& grid, int k, std::uint64_t seed) {
  if (grid.empty()) throw InvalidArgument("cross_validate: empty grid");
  std::size_t n_points = 1;
  for (const auto& axis : grid) {
    if (axis.values.empty()) {
      throw InvalidArgument("cross_validate: grid axis '" + axis.name + "' has no values");
    }
    if (!is_known_parameter(axis.name)) {
      throw InvalidArgument("cross_validate: unknown hyperparameter '" + axis.name + "'");
    }
    n_points *= axis.values.size();
  }
  const Metric metric = metric_for(data);
  const std::vector<DataSplit> folds = kfold(data, k, seed);

  CrossValidationResult result;
  result.scores.resize(n_points);
  std::size_t best = n_points;
  for (std::size_t p = 0; p < n_points; ++p) {
    // Mixed-radix decode, last axis fastest.
    std::vector<double> values(grid.size());
    std::size_t rem = p;
    for (std::size_t a = grid.size(); a-- > 0;) {
      values[a] = grid[a].values[rem % grid[a].values.size()];
      rem /= grid[a].values.size();
    }
    Method candidate = method;
    for (std::size_t a = 0; a < grid.size(); ++a) apply_parameter(candidate, grid[a].name, values[a]);

    GridPointScore& score = result.scores[p];
    score.values = values;
    try {
      double total = 0.0;
      for (const auto& fold : folds) {
        const FitResult fitted = fit_method(fold.train, candidate);
        const double m = finite_mean(evaluate(fitted.W, fold.test, metric));
        if (!std::isfinite(m)) throw Error("validation metric undefined");
        total += m;
      }
      score.mean_metric = total / static_cast<double>(folds.size());
    } catch (const std::exception& e) {
      score.failed = true;
      std::ostringstream os;
      os << "cross_validate: " << method.name << " grid point (";
      for (std::size_t a = 0; a < grid.size(); ++a) {
        os << (a ? ", " : "") << grid[a].name << "=" << values[a];
      }
      os << ") discarded: " << e.what();
      result.warnings.push_back(os.str());
      continue;
    }
    if (best == n_points || better(metric, score.mean_metric, result.scores[best].mean_metric)) {
      best = p;
      result.best = std::move(candidate);
    }
  }
  if (best == n_points) throw Error("cross_validate: every grid point failed for " + method.name);
  result.best_index = best;
  return result;
}

}  // namespace spmtl
