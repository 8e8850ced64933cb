#include "spmtl/loss.hpp"

#include <cmath>

#include "spmtl/knowledge.hpp"

namespace spmtl {

double logistic_loss(double y_true, double margin) {
  const double z = y_true * margin;
  if (z > 30.0) return std::exp(-z);
  if (z < -30.0) return -z + std::exp(z);
  return std::log1p(std::exp(-z));
}

double task_average_loss(const TaskDataset& task, const Vector& w) {
  if (w.size() != task.dim()) {
    throw DimensionError("parameter vector has " + std::to_string(w.size()) +
                         " entries, task " + std::to_string(task.task_id) +
                         " has " + std::to_string(task.dim()) + " features");
  }
  const Vector margin = task.X * w;
  double total = 0.0;
  if (task.kind == TaskKind::Regression) {
    for (Index i = 0; i < margin.size(); ++i) total += squared_loss(task.y[i], margin[i]);
  } else {
    for (Index i = 0; i < margin.size(); ++i) total += logistic_loss(task.y[i], margin[i]);
  }
  return total / static_cast<double>(task.size());
}

double task_score(const TaskDataset& task, const Vector& w,
                  const SharedKnowledge& theta, double gamma, double eps) {
  return task_average_loss(task, w) + penalty(w, theta, gamma, eps);
}

}  // namespace spmtl
