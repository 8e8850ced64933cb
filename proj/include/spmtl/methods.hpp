// Named learning methods (the rows of the comparison table) behind one
// fit/evaluate interface.

#ifndef SPMTL_METHODS_HPP_
#define SPMTL_METHODS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "spmtl/trainer.hpp"

namespace spmtl {

enum class MethodKind { STL, ITL, CL, MTL };

struct Method {
  std::string name;
  MethodKind kind = MethodKind::MTL;
  AlgorithmSpec spec;  // pacing.gamma is used by every kind
};

// STL, ITL, CL, MMTL, spMMTL, MTFL, spMTFL, MTASO, spMTASO.
Method method_by_name(const std::string& name);
std::vector<std::string> known_method_names();

// Name of the non-self-paced counterpart ("spMTFL" -> "MTFL"), if any.
std::optional<std::string> baseline_of(const std::string& name);

struct FitResult {
  ModelParams W;  // d x T; STL repeats its single model in every column
  std::optional<TrainReport> report;
  std::vector<Index> order;  // CL only
};

FitResult fit_method(const MultitaskDataset& data, const Method& method);

// Sets a hyperparameter by name: gamma, lambda0, lambda0_scale, c, delta, h,
// max_outer_iters, epsilon, lambda_max, feature_eps.
void apply_parameter(Method& method, const std::string& name, double value);
bool is_known_parameter(const std::string& name);

// Whether the parameter has any effect on this method (gamma always does;
// pacing parameters only on self-paced methods; h only on MTASO).
bool parameter_applies(const Method& method, const std::string& name);

}  // namespace spmtl

#endif  // SPMTL_METHODS_HPP_
