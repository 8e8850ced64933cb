#include "spmtl/types.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace spmtl {

TaskDataset make_task(int task_id, Matrix X, Vector y, TaskKind kind) {
  if (X.rows() < 1) {
    throw InvalidArgument("task " + std::to_string(task_id) + ": no examples");
  }
  if (X.rows() != y.size()) {
    std::ostringstream os;
    os << "task " << task_id << ": X has " << X.rows() << " rows but y has "
       << y.size() << " entries";
    throw DimensionError(os.str());
  }
  if (kind == TaskKind::BinaryClassification) {
    std::set<double> values(y.data(), y.data() + y.size());
    if (values.size() > 2) {
      throw InvalidArgument("task " + std::to_string(task_id) +
                            ": classification labels take more than two values");
    }
    for (double v : values) {
      if (v != 0.0 && v != 1.0 && v != -1.0) {
        throw InvalidArgument("task " + std::to_string(task_id) +
                              ": labels must be in {0,1} or {-1,+1}");
      }
    }
    if (values.count(0.0) && values.count(-1.0)) {
      throw InvalidArgument("task " + std::to_string(task_id) +
                            ": mixed {0,1} and {-1,+1} labels");
    }
    for (Index i = 0; i < y.size(); ++i) {
      if (y[i] == 0.0) y[i] = -1.0;
    }
  }
  return TaskDataset{task_id, std::move(X), std::move(y), kind};
}

MultitaskDataset::MultitaskDataset(std::vector<TaskDataset> tasks)
    : tasks_(std::move(tasks)) {
  if (tasks_.empty()) throw InvalidArgument("dataset has no tasks");
  dim_ = tasks_.front().dim();
  std::set<int> ids;
  for (const auto& task : tasks_) {
    if (task.dim() != dim_) {
      std::ostringstream os;
      os << "task " << task.task_id << " has " << task.dim()
         << " features, expected " << dim_;
      throw DimensionError(os.str());
    }
    if (task.size() < 1 || task.X.rows() != task.y.size()) {
      throw DimensionError("task " + std::to_string(task.task_id) +
                           ": malformed example block");
    }
    if (!ids.insert(task.task_id).second) {
      throw InvalidArgument("duplicate task id " + std::to_string(task.task_id));
    }
  }
}

Index MultitaskDataset::total_examples() const {
  Index n = 0;
  for (const auto& task : tasks_) n += task.size();
  return n;
}

Index MultitaskDataset::find(int task_id) const {
  for (std::size_t t = 0; t < tasks_.size(); ++t) {
    if (tasks_[t].task_id == task_id) return static_cast<Index>(t);
  }
  return -1;
}

void check_invariants(const TaskWeights& weights, double delta) {
  const Vector& tau = weights.tau;
  if (weights.mode == TauMode::Entropy) {
    if ((tau.array() <= 0.0).any()) {
      throw InvalidArgument("entropy-mode task weights must be positive");
    }
    if (std::abs(tau.sum() - 1.0) > 1e-9) {
      throw InvalidArgument("entropy-mode task weights must sum to 1");
    }
  } else {
    for (Index t = 0; t < tau.size(); ++t) {
      if (tau[t] != 1.0 && tau[t] != delta) {
        throw InvalidArgument("hard-mode task weights must be 1 or delta");
      }
    }
  }
}

Index knowledge_dim(const SharedKnowledge& theta) {
  return std::visit(
      [](const auto& k) -> Index {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, MeanVector>) {
          return k.w0.size();
        } else if constexpr (std::is_same_v<T, FeatureMatrix>) {
          return k.D.rows();
        } else {
          return k.U.cols();
        }
      },
      theta);
}

const char* knowledge_name(const SharedKnowledge& theta) {
  switch (theta.index()) {
    case 0: return "mean_vector";
    case 1: return "feature_matrix";
    default: return "subspace";
  }
}

void check_invariants(const SharedKnowledge& theta) {
  if (const auto* fm = std::get_if<FeatureMatrix>(&theta)) {
    const Matrix& D = fm->D;
    if (D.rows() != D.cols()) throw DimensionError("feature matrix is not square");
    if ((D - D.transpose()).cwiseAbs().maxCoeff() >= 1e-10) {
      throw InvalidArgument("feature matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(D, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10) {
      throw InvalidArgument("feature matrix is not positive semidefinite");
    }
    if (std::abs(D.trace() - 1.0) > 1e-8) {
      throw InvalidArgument("feature matrix trace is not 1");
    }
  } else if (const auto* sub = std::get_if<Subspace>(&theta)) {
    const Matrix& U = sub->U;
    if (U.rows() < 1 || U.rows() > U.cols()) {
      throw InvalidArgument("subspace dimension h must satisfy 1 <= h <= d");
    }
    const Matrix gram = U * U.transpose();
    if ((gram - Matrix::Identity(U.rows(), U.rows())).cwiseAbs().maxCoeff() > 1e-8) {
      throw InvalidArgument("subspace rows are not orthonormal");
    }
  }
}

void check_invariants(const PacingConfig& pacing) {
  if (!(pacing.c > 1.0)) {
    throw InvalidArgument("pacing factor c must be > 1");
  }
  if (!(pacing.delta > 0.0 && pacing.delta < 1.0)) {
    throw InvalidArgument("delta must lie in (0, 1)");
  }
  if (!(pacing.epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (!(pacing.gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  if (pacing.lambda0 && !(*pacing.lambda0 > 0.0)) {
    throw InvalidArgument("lambda0 must be positive");
  }
  if (!(pacing.lambda0_scale > 0.0)) {
    throw InvalidArgument("lambda0_scale must be positive");
  }
  if (pacing.max_outer_iters < 1) {
    throw InvalidArgument("max_outer_iters must be at least 1");
  }
  if (pacing.h && *pacing.h < 1) throw InvalidArgument("h must be at least 1");
  if (!(pacing.feature_eps >= 0.0)) {
    throw InvalidArgument("feature_eps must be nonnegative");
  }
}

std::vector<double> TrainReport::lambda_schedule() const {
  std::vector<double> out;
  out.reserve(tau_history.size());
  for (const auto& rec : tau_history) out.push_back(rec.lambda);
  return out;
}

}  // namespace spmtl
