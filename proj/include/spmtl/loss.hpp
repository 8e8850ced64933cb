// Per-example losses, per-task average loss and the task score that drives
// self-paced task selection.

#ifndef SPMTL_LOSS_HPP_
#define SPMTL_LOSS_HPP_

#include "spmtl/types.hpp"

namespace spmtl {

inline double squared_loss(double y_true, double y_pred) {
  const double r = y_true - y_pred;
  return r * r;
}

// log(1 + exp(-y * margin)) for y in {-1, +1}.
double logistic_loss(double y_true, double margin);

// Mean loss over the task's examples: squared for regression tasks,
// logistic for classification tasks.
double task_average_loss(const TaskDataset& task, const Vector& w);

// task_average_loss + penalty(w, theta, gamma). Sole input to both tau rules.
double task_score(const TaskDataset& task, const Vector& w,
                  const SharedKnowledge& theta, double gamma,
                  double eps = kDefaultFeatureEps);

}  // namespace spmtl

#endif  // SPMTL_LOSS_HPP_
