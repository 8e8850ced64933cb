// Self-paced task selection: the hard and entropy tau rules, the geometric
// threshold schedule and the outer-loop convergence test.

#ifndef SPMTL_PACING_HPP_
#define SPMTL_PACING_HPP_

#include "spmtl/types.hpp"

namespace spmtl {

struct PacingState {
  double lambda = 1.0;
  int iteration = 1;
  Vector tau_prev;
};

// tau_t = 1 if scores_t < lambda, else delta.
TaskWeights update_tau_hard(const Vector& scores, double lambda, double delta = 0.01);

// tau_t proportional to exp(-scores_t / lambda); the exact minimizer of
// sum_t tau_t scores_t + lambda sum_t tau_t log tau_t over the simplex.
TaskWeights update_tau_entropy(const Vector& scores, double lambda);

// -sum_t tau_t log tau_t. Hard-mode weights are rejected.
double entropy(const TaskWeights& tau);

PacingState advance_lambda(const PacingState& state, double c);

// |tau_new - tau_prev|^2 <= epsilon
bool has_converged(const TaskWeights& tau_new, const Vector& tau_prev, double epsilon);

// tau^(0): uniform 1/T.
Vector initial_tau(Index num_tasks);

double median(Vector values);

}  // namespace spmtl

#endif  // SPMTL_PACING_HPP_
