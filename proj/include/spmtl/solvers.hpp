// Per-task penalized minimization and the dense linear-algebra kernels used
// by the shared-knowledge updates.

#ifndef SPMTL_SOLVERS_HPP_
#define SPMTL_SOLVERS_HPP_

#include "spmtl/types.hpp"

namespace spmtl {

// Added to every normal-equation matrix. Keeps the solve defined when X^T X
// and gamma*M are both rank deficient (N_t < d with a projector penalty).
inline constexpr double kRidgeFloor = 1e-10;

// gamma * (w - anchor)^T M (w - anchor). M symmetric PSD.
struct AnchoredPenalty {
  Matrix M;
  Vector anchor;
  double gamma = 0.0;

  static AnchoredPenalty ridge(Index d, double gamma);

  double value(const Vector& w) const;
  Vector gradient(const Vector& w) const;
  Index dim() const { return M.rows(); }
};

// X^T X / N and X^T y / N for one task. Depends only on the data, so the
// trainer computes it once per fit.
struct NormalEquations {
  Matrix gram;
  Vector moment;

  static NormalEquations of(const TaskDataset& task);
};

Vector solve_penalized_least_squares(const TaskDataset& task,
                                     const AnchoredPenalty& penalty);
Vector solve_penalized_least_squares(const NormalEquations& normal,
                                     const AnchoredPenalty& penalty);

// Damped Newton from the anchor. Stops when the gradient norm drops below
// tol or the Newton decrement reaches floating-point resolution of the
// objective; throws SolverError after max_iters.
Vector solve_penalized_logistic(const TaskDataset& task,
                                const AnchoredPenalty& penalty,
                                double tol = 1e-8, int max_iters = 100);

// Dispatches on task.kind.
Vector solve_penalized(const TaskDataset& task, const AnchoredPenalty& penalty);

// Value of the per-task subproblem: average loss plus penalty.
double penalized_objective(const TaskDataset& task, const AnchoredPenalty& penalty,
                           const Vector& w);

// Symmetric PSD square root. Eigenvalues in [-1e-10 * max(1, |C|), 0) are
// clamped to zero; anything more negative is rejected.
Matrix psd_sqrt(const Matrix& C);

// h x d; rows are unit eigenvectors for the h largest eigenvalues, in
// descending eigenvalue order, first nonzero entry of each row positive.
Matrix top_h_eigenvectors(const Matrix& C, Index h);

// (D + eps I)^{-1}, exactly symmetric.
Matrix regularized_inverse(const Matrix& D, double eps);

}  // namespace spmtl

#endif  // SPMTL_SOLVERS_HPP_
