// Shared-knowledge penalties P(w, theta) and the theta-step
// argmin_theta sum_t tau_t P(w_t, theta) for the three instantiations.

#ifndef SPMTL_KNOWLEDGE_HPP_
#define SPMTL_KNOWLEDGE_HPP_

#include "spmtl/kernels.hpp"
#include "spmtl/solvers.hpp"
#include "spmtl/types.hpp"

namespace spmtl {

// MeanVector:    gamma * |w - w0|^2
// FeatureMatrix: gamma * w^T (D + eps I)^{-1} w
// Subspace:      gamma * |(I - U^T U) w|^2   (v_t = U w_t eliminated)
double penalty(const Vector& w, const SharedKnowledge& theta, double gamma,
               double eps = kDefaultFeatureEps);

// The same penalty as a quadratic the per-task solvers consume.
AnchoredPenalty anchored_penalty(const SharedKnowledge& theta, double gamma,
                                 double eps = kDefaultFeatureEps);

// Weighted mean sum_t tau_t w_t / sum_t tau_t.
MeanVector update_mean(const ModelParams& W, const TaskWeights& tau);

// sqrt(C) / trace(sqrt(C)) with C = sum_t tau_t w_t w_t^T + eps I.
FeatureMatrix update_feature_matrix(const ModelParams& W, const TaskWeights& tau,
                                    double eps = kDefaultFeatureEps,
                                    Execution exec = Execution::Serial);

// Top-h eigenvectors of sum_t tau_t w_t w_t^T.
Subspace update_subspace(const ModelParams& W, const TaskWeights& tau, Index h,
                         Execution exec = Execution::Serial);

// Dispatches on the alternative held by `previous`.
SharedKnowledge update_knowledge(const SharedKnowledge& previous, const ModelParams& W,
                                 const TaskWeights& tau, double eps,
                                 Execution exec = Execution::Serial);

// sum_t tau_t P(w_t, theta).
double weighted_penalty(const ModelParams& W, const TaskWeights& tau,
                        const SharedKnowledge& theta, double gamma,
                        double eps = kDefaultFeatureEps);

}  // namespace spmtl

#endif  // SPMTL_KNOWLEDGE_HPP_
