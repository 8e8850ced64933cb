// Data-parallel inner loops of the trainer. Each kernel has an OpenMP
// version and a plain serial reference; both produce bit-identical results
// because every output element is accumulated in the same order.

#ifndef SPMTL_KERNELS_HPP_
#define SPMTL_KERNELS_HPP_

#include <vector>

#include "spmtl/solvers.hpp"
#include "spmtl/types.hpp"

namespace spmtl {

enum class Execution { Serial, Parallel };

// A dataset plus its cached normal equations (regression tasks only).
class TaskBatch {
 public:
  explicit TaskBatch(const MultitaskDataset& data);

  const MultitaskDataset& data() const { return *data_; }
  const NormalEquations& normal(std::size_t t) const { return normal_[t]; }
  Index num_tasks() const { return data_->num_tasks(); }
  Index dim() const { return data_->dim(); }

  // Solves task t's subproblem under `penalty`.
  Vector solve(std::size_t t, const AnchoredPenalty& penalty) const;

 private:
  const MultitaskDataset* data_;
  std::vector<NormalEquations> normal_;
};

namespace serial {

ModelParams solve_all(const TaskBatch& batch, const AnchoredPenalty& penalty);
Vector task_losses(const MultitaskDataset& data, const ModelParams& W);
// sum_t tau_t w_t w_t^T
Matrix weighted_covariance(const ModelParams& W, const Vector& tau);

}  // namespace serial

namespace omp {

ModelParams solve_all(const TaskBatch& batch, const AnchoredPenalty& penalty);
Vector task_losses(const MultitaskDataset& data, const ModelParams& W);
Matrix weighted_covariance(const ModelParams& W, const Vector& tau);

}  // namespace omp

inline ModelParams solve_all(const TaskBatch& batch, const AnchoredPenalty& penalty,
                             Execution exec) {
  return exec == Execution::Parallel ? omp::solve_all(batch, penalty)
                                     : serial::solve_all(batch, penalty);
}

inline Vector task_losses(const MultitaskDataset& data, const ModelParams& W,
                          Execution exec) {
  return exec == Execution::Parallel ? omp::task_losses(data, W)
                                     : serial::task_losses(data, W);
}

inline Matrix weighted_covariance(const ModelParams& W, const Vector& tau,
                                  Execution exec) {
  return exec == Execution::Parallel ? omp::weighted_covariance(W, tau)
                                     : serial::weighted_covariance(W, tau);
}

}  // namespace spmtl

#endif  // SPMTL_KERNELS_HPP_
