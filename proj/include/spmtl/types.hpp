// Domain types shared across the self-paced multitask learning library.

#ifndef SPMTL_TYPES_HPP_
#define SPMTL_TYPES_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace spmtl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// d x T stack of task parameters; column t is w_t.
using ModelParams = Matrix;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

enum class TaskKind { Regression, BinaryClassification };

// One task's training data. Classification labels are stored as {-1, +1}.
struct TaskDataset {
  int task_id = 0;
  Matrix X;
  Vector y;
  TaskKind kind = TaskKind::Regression;

  Index size() const { return X.rows(); }
  Index dim() const { return X.cols(); }
};

// Validates shape invariants and maps {0,1} labels to {-1,+1}.
TaskDataset make_task(int task_id, Matrix X, Vector y, TaskKind kind);

class MultitaskDataset {
 public:
  MultitaskDataset() = default;
  explicit MultitaskDataset(std::vector<TaskDataset> tasks);

  const std::vector<TaskDataset>& tasks() const { return tasks_; }
  const TaskDataset& operator[](std::size_t t) const { return tasks_[t]; }
  Index num_tasks() const { return static_cast<Index>(tasks_.size()); }
  Index dim() const { return dim_; }
  Index total_examples() const;

  // Index of the task with the given id, or -1.
  Index find(int task_id) const;

 private:
  std::vector<TaskDataset> tasks_;
  Index dim_ = 0;
};

enum class TauMode { Hard, Entropy };

struct TaskWeights {
  Vector tau;
  TauMode mode = TauMode::Entropy;

  Index size() const { return tau.size(); }
};

// Throws InvalidArgument when the mode's invariants do not hold.
void check_invariants(const TaskWeights& weights, double delta = 0.01);

struct MeanVector {
  Vector w0;
};

struct FeatureMatrix {
  Matrix D;
};

// Rows of U span the shared predictive subspace; h = U.rows().
struct Subspace {
  Matrix U;
  Index h() const { return U.rows(); }
};

using SharedKnowledge = std::variant<MeanVector, FeatureMatrix, Subspace>;

Index knowledge_dim(const SharedKnowledge& theta);
void check_invariants(const SharedKnowledge& theta);
const char* knowledge_name(const SharedKnowledge& theta);

inline constexpr double kDefaultFeatureEps = 1e-8;

struct PacingConfig {
  // Absolute initial threshold; when unset, lambda0_scale times the median
  // of the first-iteration task scores is used.
  std::optional<double> lambda0;
  double lambda0_scale = 1.0;
  double c = 1.1;
  double delta = 0.01;
  double epsilon = 1e-6;
  int max_outer_iters = 50;
  double gamma = 1.0;
  std::optional<int> h;
  double lambda_max = std::numeric_limits<double>::infinity();
  double feature_eps = kDefaultFeatureEps;
};

// Throws InvalidArgument naming the violated constraint.
void check_invariants(const PacingConfig& pacing);

struct TauRecord {
  int iteration = 0;
  double lambda = 0.0;
  Vector tau;
  Vector scores;
};

// Objective values around each block of one outer iteration, all at that
// iteration's lambda. before_w uses W^(k-1); NaN on the first iteration.
struct DescentRecord {
  double before_w = std::numeric_limits<double>::quiet_NaN();
  double after_w = 0.0;
  double after_tau = 0.0;
  double after_theta = 0.0;
};

struct Iterate {
  ModelParams W;
  SharedKnowledge theta;
};

struct TrainReport {
  ModelParams W;
  SharedKnowledge theta;
  std::vector<TauRecord> tau_history;
  std::vector<double> objective_history;
  std::vector<DescentRecord> descent;
  std::vector<Iterate> iterates;  // filled only when requested
  int iterations_run = 0;
  bool converged = false;

  std::vector<double> lambda_schedule() const;
};

}  // namespace spmtl

#endif  // SPMTL_TYPES_HPP_
