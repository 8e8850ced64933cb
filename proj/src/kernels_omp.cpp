#include <exception>
#include <vector>

#include "spmtl/kernels.hpp"
#include "spmtl/loss.hpp"

namespace spmtl::omp {
namespace {

// Exceptions may not leave an OpenMP region; keep the lowest-index one.
void rethrow_first(const std::vector<std::exception_ptr>& errors) {
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

ModelParams solve_all(const TaskBatch& batch, const AnchoredPenalty& penalty) {
  const Index T = batch.num_tasks();
  ModelParams W(batch.dim(), T);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(T));
#pragma omp parallel for schedule(dynamic)
  for (Index t = 0; t < T; ++t) {
    try {
      W.col(t) = batch.solve(static_cast<std::size_t>(t), penalty);
    } catch (...) {
      errors[static_cast<std::size_t>(t)] = std::current_exception();
    }
  }
  rethrow_first(errors);
  return W;
}

Vector task_losses(const MultitaskDataset& data, const ModelParams& W) {
  if (W.cols() != data.num_tasks()) {
    throw DimensionError("parameter matrix has " + std::to_string(W.cols()) +
                         " columns for " + std::to_string(data.num_tasks()) + " tasks");
  }
  const Index T = data.num_tasks();
  Vector out(T);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(T));
#pragma omp parallel for schedule(static)
  for (Index t = 0; t < T; ++t) {
    try {
      out[t] = task_average_loss(data[static_cast<std::size_t>(t)], W.col(t));
    } catch (...) {
      errors[static_cast<std::size_t>(t)] = std::current_exception();
    }
  }
  rethrow_first(errors);
  return out;
}

Matrix weighted_covariance(const ModelParams& W, const Vector& tau) {
  if (W.cols() != tau.size()) {
    throw DimensionError("task weights do not match parameter columns");
  }
  const Index d = W.rows();
  const Index T = W.cols();
  Matrix C(d, d);
#pragma omp parallel for schedule(dynamic)
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

}  // namespace spmtl::omp
