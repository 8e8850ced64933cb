// Self-paced alternating minimization over (W, tau, theta), the plain MTL
// alternation it reduces to, and the ITL / STL / curriculum baselines.

#ifndef SPMTL_TRAINER_HPP_
#define SPMTL_TRAINER_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spmtl/kernels.hpp"
#include "spmtl/types.hpp"

namespace spmtl {

enum class Variant { MMTL, MTFL, MTASO };
enum class TauRule { Hard, Entropy };

const char* variant_name(Variant v);

struct AlgorithmSpec {
  Variant variant = Variant::MTFL;
  bool self_paced = true;
  TauRule tau_rule = TauRule::Entropy;
  PacingConfig pacing;
  std::optional<SharedKnowledge> theta0;
  // Seeds the random orthonormal initial subspace (MTASO without theta0).
  std::uint64_t seed = 0;
  bool keep_iterates = false;
  Execution execution = Execution::Parallel;
};

// Throws InvalidArgument on violated AlgorithmSpec invariants.
void validate(const AlgorithmSpec& spec, Index d);

// Theta^(0) when the spec does not provide one: w0 = 0, D = I/d, or h rows
// of a seeded random orthonormal matrix.
SharedKnowledge default_theta0(Variant variant, Index d, std::optional<int> h,
                               std::uint64_t seed);

// Per iteration: solve every w_t against theta^(k-1); score tasks and set
// tau^(k) with the configured rule; refit theta with tau^(k); lambda <- c lambda.
// Stops when |tau^(k) - tau^(k-1)|^2 <= epsilon or after max_outer_iters.
TrainReport fit_self_paced(const MultitaskDataset& data, const AlgorithmSpec& spec);

// Same alternation with tau pinned to ones and no threshold schedule. Stops
// when W and theta both move by less than epsilon (max-abs).
TrainReport fit_baseline_mtl(const MultitaskDataset& data, const AlgorithmSpec& spec);

// Dispatches on spec.self_paced.
TrainReport fit(const MultitaskDataset& data, const AlgorithmSpec& spec);

// Independent ridge per task.
ModelParams fit_itl(const MultitaskDataset& data, double gamma,
                    Execution exec = Execution::Parallel);

// One ridge/logistic model on all tasks' rows pooled.
Vector fit_stl(const MultitaskDataset& data, double gamma);

struct CurriculumResult {
  std::vector<Index> order;  // task positions, first learned first
  ModelParams W;
};

// Greedy task ordering; each task is anchored to the previously learned one.
CurriculumResult fit_curriculum(const MultitaskDataset& data, double gamma);

// sum_t tau_t [L_t + P(w_t, theta)] + lambda r(tau), r = -|tau|_1 (Hard) or
// r = -H(tau) (Entropy).
double objective_value(const MultitaskDataset& data, const ModelParams& W,
                       const TaskWeights& tau, const SharedKnowledge& theta,
                       double gamma, double lambda, TauRule rule,
                       double eps = kDefaultFeatureEps);

Vector predict(const Vector& w, const Matrix& X);
std::vector<Vector> predict(const ModelParams& W, const MultitaskDataset& data);

}  // namespace spmtl

#endif  // SPMTL_TRAINER_HPP_
