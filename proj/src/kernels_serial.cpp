#include "spmtl/kernels.hpp"

#include "spmtl/loss.hpp"

namespace spmtl {

TaskBatch::TaskBatch(const MultitaskDataset& data) : data_(&data) {
  normal_.resize(data.tasks().size());
  for (std::size_t t = 0; t < data.tasks().size(); ++t) {
    if (data[t].kind == TaskKind::Regression) normal_[t] = NormalEquations::of(data[t]);
  }
}

Vector TaskBatch::solve(std::size_t t, const AnchoredPenalty& penalty) const {
  const TaskDataset& task = (*data_)[t];
  if (task.kind == TaskKind::Regression) {
    return solve_penalized_least_squares(normal_[t], penalty);
  }
  return solve_penalized_logistic(task, penalty);
}

namespace serial {

ModelParams solve_all(const TaskBatch& batch, const AnchoredPenalty& penalty) {
  ModelParams W(batch.dim(), batch.num_tasks());
  for (Index t = 0; t < batch.num_tasks(); ++t) {
    W.col(t) = batch.solve(static_cast<std::size_t>(t), penalty);
  }
  return W;
}

Vector task_losses(const MultitaskDataset& data, const ModelParams& W) {
  if (W.cols() != data.num_tasks()) {
    throw DimensionError("parameter matrix has " + std::to_string(W.cols()) +
                         " columns for " + std::to_string(data.num_tasks()) + " tasks");
  }
  Vector out(data.num_tasks());
  for (Index t = 0; t < data.num_tasks(); ++t) {
    out[t] = task_average_loss(data[static_cast<std::size_t>(t)], W.col(t));
  }
  return out;
}

Matrix weighted_covariance(const ModelParams& W, const Vector& tau) {
  if (W.cols() != tau.size()) {
    throw DimensionError("task weights do not match parameter columns");
  }
  const Index d = W.rows();
  const Index T = W.cols();
  Matrix C(d, d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = j; i < d; ++i) {
      double acc = 0.0;
      for (Index t = 0; t < T; ++t) acc += tau[t] * W(i, t) * W(j, t);
      C(i, j) = acc;
      C(j, i) = acc;
    }
  }
  return C;
}

}  // namespace serial
}  // namespace spmtl
