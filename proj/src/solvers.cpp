#include "spmtl/solvers.hpp"

#include <cmath>
#include <sstream>

#include "spmtl/loss.hpp"

namespace spmtl {
namespace {

void check_square_symmetric(const Matrix& C, const char* what) {
  if (C.rows() != C.cols()) {
    throw DimensionError(std::string(what) + ": matrix is not square");
  }
  const double scale = std::max(1.0, C.cwiseAbs().maxCoeff());
  if ((C - C.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw InvalidArgument(std::string(what) + ": matrix is not symmetric");
  }
}

void check_penalty(const AnchoredPenalty& penalty, Index d) {
  if (penalty.M.rows() != d || penalty.M.cols() != d || penalty.anchor.size() != d) {
    std::ostringstream os;
    os << "penalty has dimension " << penalty.M.rows() << "x" << penalty.M.cols()
       << " / anchor " << penalty.anchor.size() << ", task has " << d << " features";
    throw DimensionError(os.str());
  }
}

// Solves the SPD system A x = b with one step of iterative refinement.
Vector solve_spd(const Matrix& A, const Vector& b) {
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() == Eigen::Success) {
    const double rcond = llt.rcond();
    if (rcond > 1e-16) {
      Vector x = llt.solve(b);
      x += llt.solve(b - A * x);
      return x;
    }
  }
  Eigen::LDLT<Matrix> ldlt(A);
  const double rcond = ldlt.info() == Eigen::Success ? ldlt.rcond() : 0.0;
  if (!(rcond > 1e-16)) {
    std::ostringstream os;
    os << "penalized normal equations are singular (reciprocal condition "
          "estimate "
       << rcond << ")";
    throw SolverError(os.str());
  }
  Vector x = ldlt.solve(b);
  x += ldlt.solve(b - A * x);
  return x;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

AnchoredPenalty AnchoredPenalty::ridge(Index d, double gamma) {
  return AnchoredPenalty{Matrix::Identity(d, d), Vector::Zero(d), gamma};
}

double AnchoredPenalty::value(const Vector& w) const {
  const Vector diff = w - anchor;
  return gamma * diff.dot(M * diff);
}

Vector AnchoredPenalty::gradient(const Vector& w) const {
  return 2.0 * gamma * (M * (w - anchor));
}

NormalEquations NormalEquations::of(const TaskDataset& task) {
  const double n = static_cast<double>(task.size());
  NormalEquations ne;
  ne.gram = Matrix(task.dim(), task.dim());
  ne.gram.setZero();
  ne.gram.selfadjointView<Eigen::Lower>().rankUpdate(task.X.transpose(), 1.0 / n);
  ne.gram = ne.gram.selfadjointView<Eigen::Lower>();
  ne.moment = task.X.transpose() * task.y / n;
  return ne;
}

Vector solve_penalized_least_squares(const NormalEquations& normal,
                                     const AnchoredPenalty& penalty) {
  const Index d = normal.gram.rows();
  check_penalty(penalty, d);
  Matrix A = normal.gram + penalty.gamma * penalty.M;
  A.diagonal().array() += kRidgeFloor;
  const Vector b = normal.moment + penalty.gamma * (penalty.M * penalty.anchor);
  return solve_spd(A, b);
}

Vector solve_penalized_least_squares(const TaskDataset& task,
                                     const AnchoredPenalty& penalty) {
  if (task.kind != TaskKind::Regression) {
    throw InvalidArgument("least-squares solver needs a regression task");
  }
  check_penalty(penalty, task.dim());
  return solve_penalized_least_squares(NormalEquations::of(task), penalty);
}

double penalized_objective(const TaskDataset& task, const AnchoredPenalty& penalty,
                           const Vector& w) {
  return task_average_loss(task, w) + penalty.value(w);
}

namespace {
constexpr double kDecrementTol = 1e-14;
constexpr double kStallTol = 1e-10;
}  // namespace

Vector solve_penalized_logistic(const TaskDataset& task, const AnchoredPenalty& penalty,
                                double tol, int max_iters) {
  if (task.kind != TaskKind::BinaryClassification) {
    throw InvalidArgument("logistic solver needs a classification task");
  }
  const Index d = task.dim();
  check_penalty(penalty, d);
  const double n = static_cast<double>(task.size());
  const Matrix& X = task.X;
  const Vector& y = task.y;

  Vector w = penalty.anchor;
  double f = penalized_objective(task, penalty, w);
  double grad_norm = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    const Vector margin = X * w;
    Vector coef(margin.size());
    Vector curvature(margin.size());
    for (Index i = 0; i < margin.size(); ++i) {
      const double p = sigmoid(-y[i] * margin[i]);
      coef[i] = -y[i] * p / n;
      curvature[i] = p * (1.0 - p) / n;
    }
    const Vector grad = X.transpose() * coef + penalty.gradient(w);
    grad_norm = grad.norm();
    if (grad_norm < tol) return w;

    Matrix H = X.transpose() * curvature.asDiagonal() * X +
               2.0 * penalty.gamma * penalty.M;
    H.diagonal().array() += kRidgeFloor;
    const Vector step = solve_spd(H, -grad);
    const double slope = grad.dot(step);
    // Newton decrement: half of it estimates f - f*.
    if (-0.5 * slope <= kDecrementTol * std::max(1.0, std::abs(f))) return w;

    double t = 1.0;
    Vector candidate = w + step;
    double f_candidate = penalized_objective(task, penalty, candidate);
    for (int halving = 0; halving < 60 && f_candidate > f + 1e-4 * t * slope; ++halving) {
      t *= 0.5;
      candidate = w + t * step;
      f_candidate = penalized_objective(task, penalty, candidate);
    }
    if (f_candidate >= f) {
      // No descent left in floating point.
      if (-0.5 * slope <= kStallTol * std::max(1.0, std::abs(f))) return w;
      break;
    }
    w = std::move(candidate);
    f = f_candidate;
  }
  std::ostringstream os;
  os << "logistic solver for task " << task.task_id << " stopped after "
     << max_iters << " iterations with gradient norm " << grad_norm;
  throw SolverError(os.str());
}

Vector solve_penalized(const TaskDataset& task, const AnchoredPenalty& penalty) {
  if (task.kind == TaskKind::Regression) {
    return solve_penalized_least_squares(task, penalty);
  }
  return solve_penalized_logistic(task, penalty);
}

Matrix psd_sqrt(const Matrix& C) {
  check_square_symmetric(C, "psd_sqrt");
  const Matrix sym = 0.5 * (C + C.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw SolverError("psd_sqrt: eigendecomposition failed");
  }
  const double floor = -1e-10 * std::max(1.0, sym.cwiseAbs().maxCoeff());
  Vector root(eig.eigenvalues().size());
  for (Index i = 0; i < root.size(); ++i) {
    const double lambda = eig.eigenvalues()[i];
    if (lambda < floor) {
      std::ostringstream os;
      os << "psd_sqrt: input has eigenvalue " << lambda << " (not PSD)";
      throw InvalidArgument(os.str());
    }
    root[i] = std::sqrt(std::max(lambda, 0.0));
  }
  const Matrix& V = eig.eigenvectors();
  Matrix S = V * root.asDiagonal() * V.transpose();
  return 0.5 * (S + S.transpose());
}

Matrix top_h_eigenvectors(const Matrix& C, Index h) {
  check_square_symmetric(C, "top_h_eigenvectors");
  const Index d = C.rows();
  if (h < 1 || h > d) {
    throw InvalidArgument("top_h_eigenvectors: h must satisfy 1 <= h <= d");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (C + C.transpose()));
  if (eig.info() != Eigen::Success) {
    throw SolverError("top_h_eigenvectors: eigendecomposition failed");
  }
  Matrix U(h, d);
  for (Index r = 0; r < h; ++r) {
    // Eigen sorts ascending.
    Vector v = eig.eigenvectors().col(d - 1 - r);
    for (Index j = 0; j < d; ++j) {
      if (std::abs(v[j]) > 1e-12) {
        if (v[j] < 0.0) v = -v;
        break;
      }
    }
    U.row(r) = v.transpose();
  }
  return U;
}

Matrix regularized_inverse(const Matrix& D, double eps) {
  if (D.rows() != D.cols()) throw DimensionError("regularized_inverse: not square");
  const Index d = D.rows();
  Matrix A = D;
  A.diagonal().array() += eps;
  Eigen::LDLT<Matrix> ldlt(A);
  Matrix inv = ldlt.solve(Matrix::Identity(d, d));
  inv += ldlt.solve(Matrix::Identity(d, d) - A * inv);
  return 0.5 * (inv + inv.transpose());
}

}  // namespace spmtl
