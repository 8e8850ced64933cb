#include "spmtl/knowledge.hpp"

#include <sstream>

namespace spmtl {
namespace {

void check_dim(const Vector& w, const SharedKnowledge& theta) {
  if (w.size() != knowledge_dim(theta)) {
    std::ostringstream os;
    os << "parameter vector has " << w.size() << " entries, shared knowledge has dimension "
       << knowledge_dim(theta);
    throw DimensionError(os.str());
  }
}

void check_weights(const ModelParams& W, const TaskWeights& tau) {
  if (W.cols() != tau.size()) {
    throw DimensionError("task weights do not match parameter columns");
  }
}

}  // namespace

double penalty(const Vector& w, const SharedKnowledge& theta, double gamma, double eps) {
  check_dim(w, theta);
  if (const auto* mean = std::get_if<MeanVector>(&theta)) {
    return gamma * (w - mean->w0).squaredNorm();
  }
  if (const auto* fm = std::get_if<FeatureMatrix>(&theta)) {
    return gamma * w.dot(regularized_inverse(fm->D, eps) * w);
  }
  const Matrix& U = std::get<Subspace>(theta).U;
  return gamma * (w - U.transpose() * (U * w)).squaredNorm();
}

AnchoredPenalty anchored_penalty(const SharedKnowledge& theta, double gamma, double eps) {
  const Index d = knowledge_dim(theta);
  if (const auto* mean = std::get_if<MeanVector>(&theta)) {
    return AnchoredPenalty{Matrix::Identity(d, d), mean->w0, gamma};
  }
  if (const auto* fm = std::get_if<FeatureMatrix>(&theta)) {
    return AnchoredPenalty{regularized_inverse(fm->D, eps), Vector::Zero(d), gamma};
  }
  const Matrix& U = std::get<Subspace>(theta).U;
  Matrix residual = Matrix::Identity(d, d) - U.transpose() * U;
  residual = 0.5 * (residual + residual.transpose());
  return AnchoredPenalty{std::move(residual), Vector::Zero(d), gamma};
}

MeanVector update_mean(const ModelParams& W, const TaskWeights& tau) {
  check_weights(W, tau);
  const double total = tau.tau.sum();
  if (!(total > 0.0)) throw InvalidArgument("update_mean: task weights sum to zero");
  return MeanVector{W * tau.tau / total};
}

FeatureMatrix update_feature_matrix(const ModelParams& W, const TaskWeights& tau,
                                    double eps, Execution exec) {
  check_weights(W, tau);
  if (!(tau.tau.maxCoeff() > 0.0)) {
    throw InvalidArgument("update_feature_matrix: no task has positive weight");
  }
  Matrix C = weighted_covariance(W, tau.tau, exec);
  C.diagonal().array() += eps;
  const Matrix S = psd_sqrt(C);
  const double trace = S.trace();
  if (trace < 1e-12) {
    std::ostringstream os;
    os << "update_feature_matrix: trace of the square root is " << trace
       << " (all task vectors are numerically zero)";
    throw SolverError(os.str());
  }
  return FeatureMatrix{S / trace};
}

Subspace update_subspace(const ModelParams& W, const TaskWeights& tau, Index h,
                         Execution exec) {
  check_weights(W, tau);
  if (h < 1 || h > W.rows()) {
    throw InvalidArgument("update_subspace: h must satisfy 1 <= h <= d");
  }
  return Subspace{top_h_eigenvectors(weighted_covariance(W, tau.tau, exec), h)};
}

SharedKnowledge update_knowledge(const SharedKnowledge& previous, const ModelParams& W,
                                 const TaskWeights& tau, double eps, Execution exec) {
  if (std::holds_alternative<MeanVector>(previous)) return update_mean(W, tau);
  if (std::holds_alternative<FeatureMatrix>(previous)) {
    return update_feature_matrix(W, tau, eps, exec);
  }
  return update_subspace(W, tau, std::get<Subspace>(previous).h(), exec);
}

double weighted_penalty(const ModelParams& W, const TaskWeights& tau,
                        const SharedKnowledge& theta, double gamma, double eps) {
  check_weights(W, tau);
  const AnchoredPenalty quad = anchored_penalty(theta, gamma, eps);
  if (W.rows() != quad.dim()) throw DimensionError("parameter rows do not match knowledge");
  double total = 0.0;
  for (Index t = 0; t < W.cols(); ++t) total += tau.tau[t] * quad.value(W.col(t));
  return total;
}

}  // namespace spmtl
