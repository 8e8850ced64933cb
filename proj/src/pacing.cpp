#include "spmtl/pacing.hpp"

#include <algorithm>
#include <cmath>

namespace spmtl {

TaskWeights update_tau_hard(const Vector& scores, double lambda, double delta) {
  TaskWeights out{Vector(scores.size()), TauMode::Hard};
  for (Index t = 0; t < scores.size(); ++t) {
    out.tau[t] = scores[t] < lambda ? 1.0 : delta;
  }
  return out;
}

TaskWeights update_tau_entropy(const Vector& scores, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("entropy rule needs lambda > 0");
  const double shift = scores.minCoeff();
  Vector tau(scores.size());
  for (Index t = 0; t < scores.size(); ++t) {
    tau[t] = std::exp(-(scores[t] - shift) / lambda);
  }
  tau /= tau.sum();
  return TaskWeights{std::move(tau), TauMode::Entropy};
}

double entropy(const TaskWeights& tau) {
  if (tau.mode != TauMode::Entropy) {
    throw InvalidArgument("entropy is defined for entropy-mode task weights only");
  }
  double h = 0.0;
  for (Index t = 0; t < tau.tau.size(); ++t) {
    const double p = tau.tau[t];
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

PacingState advance_lambda(const PacingState& state, double c) {
  PacingState next = state;
  next.lambda = state.lambda * c;
  next.iteration = state.iteration + 1;
  return next;
}

bool has_converged(const TaskWeights& tau_new, const Vector& tau_prev, double epsilon) {
  if (tau_new.tau.size() != tau_prev.size()) {
    throw DimensionError("convergence test on task weight vectors of different length");
  }
  return (tau_new.tau - tau_prev).squaredNorm() <= epsilon;
}

Vector initial_tau(Index num_tasks) {
  return Vector::Constant(num_tasks, 1.0 / static_cast<double>(num_tasks));
}

double median(Vector values) {
  if (values.size() == 0) throw InvalidArgument("median of an empty vector");
  std::sort(values.data(), values.data() + values.size());
  const Index n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace spmtl
