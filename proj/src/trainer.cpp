#include "spmtl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spmtl/knowledge.hpp"
#include "spmtl/loss.hpp"
#include "spmtl/pacing.hpp"
#include "spmtl/rng.hpp"
#include "spmtl/solvers.hpp"

namespace spmtl {
namespace {

double regularizer(const TaskWeights& tau, TauRule rule) {
  if (rule == TauRule::Hard) return -tau.tau.cwiseAbs().sum();
  double neg_entropy = 0.0;
  for (Index t = 0; t < tau.tau.size(); ++t) {
    const double p = tau.tau[t];
    if (p > 0.0) neg_entropy += p * std::log(p);
  }
  return neg_entropy;
}

// Objective from precomputed per-task losses and penalties.
double assemble_objective(const Vector& losses, const Vector& penalties,
                          const TaskWeights& tau, double lambda, TauRule rule) {
  double total = 0.0;
  for (Index t = 0; t < losses.size(); ++t) {
    total += tau.tau[t] * (losses[t] + penalties[t]);
  }
  if (lambda != 0.0) total += lambda * regularizer(tau, rule);
  return total;
}

Vector penalties_under(const AnchoredPenalty& quad, const ModelParams& W) {
  Vector out(W.cols());
  for (Index t = 0; t < W.cols(); ++t) out[t] = quad.value(W.col(t));
  return out;
}

double max_abs_change(const SharedKnowledge& a, const SharedKnowledge& b) {
  if (const auto* ma = std::get_if<MeanVector>(&a)) {
    return (ma->w0 - std::get<MeanVector>(b).w0).cwiseAbs().maxCoeff();
  }
  if (const auto* fa = std::get_if<FeatureMatrix>(&a)) {
    return (fa->D - std::get<FeatureMatrix>(b).D).cwiseAbs().maxCoeff();
  }
  // Subspaces are compared through their projectors; row signs and order
  // inside a degenerate eigenspace are not meaningful.
  const Matrix& Ua = std::get<Subspace>(a).U;
  const Matrix& Ub = std::get<Subspace>(b).U;
  return (Ua.transpose() * Ua - Ub.transpose() * Ub).cwiseAbs().maxCoeff();
}

enum class Mode { SelfPaced, Baseline };

TrainReport alternate(const MultitaskDataset& data, const AlgorithmSpec& spec, Mode mode) {
  const Index d = data.dim();
  const Index T = data.num_tasks();
  validate(spec, d);
  const PacingConfig& cfg = spec.pacing;
  const double eps = cfg.feature_eps;
  const Execution exec = spec.execution;
  const TauRule rule = spec.tau_rule;

  SharedKnowledge theta = spec.theta0 ? *spec.theta0
                                      : default_theta0(spec.variant, d, cfg.h, spec.seed);
  check_invariants(theta);
  if (knowledge_dim(theta) != d) {
    throw DimensionError("initial shared knowledge does not match feature dimension");
  }

  const TaskBatch batch(data);
  TrainReport report;
  ModelParams W_prev;
  Vector losses_prev;
  TaskWeights tau_prev =
      mode == Mode::SelfPaced
          ? TaskWeights{initial_tau(T), TauMode::Entropy}
          : TaskWeights{Vector::Ones(T), TauMode::Hard};
  double lambda = cfg.lambda0.value_or(0.0);

  for (int k = 1; k <= cfg.max_outer_iters; ++k) {
    const AnchoredPenalty quad = anchored_penalty(theta, cfg.gamma, eps);

    ModelParams W = solve_all(batch, quad, exec);
    const Vector losses = task_losses(data, W, exec);
    const Vector penalties = penalties_under(quad, W);
    const Vector scores = losses + penalties;

    DescentRecord descent;
    TaskWeights tau;
    if (mode == Mode::SelfPaced) {
      if (k == 1 && !cfg.lambda0) {
        lambda = cfg.lambda0_scale * median(scores);
        if (!(lambda > 0.0)) lambda = std::numeric_limits<double>::min();
      }
      if (k > 1) {
        descent.before_w = assemble_objective(losses_prev, penalties_under(quad, W_prev),
                                              tau_prev, lambda, rule);
      }
      descent.after_w = assemble_objective(losses, penalties, tau_prev, lambda, rule);
      tau = rule == TauRule::Hard ? update_tau_hard(scores, lambda, cfg.delta)
                                  : update_tau_entropy(scores, lambda);
      descent.after_tau = assemble_objective(losses, penalties, tau, lambda, rule);
    } else {
      if (k > 1) {
        descent.before_w = assemble_objective(losses_prev, penalties_under(quad, W_prev),
                                              tau_prev, 0.0, rule);
      }
      tau = TaskWeights{Vector::Ones(T), TauMode::Hard};
      descent.after_w = assemble_objective(losses, penalties, tau, 0.0, rule);
      descent.after_tau = descent.after_w;
    }

    SharedKnowledge theta_next = update_knowledge(theta, W, tau, eps, exec);
    const double lambda_used = mode == Mode::SelfPaced ? lambda : 0.0;
    descent.after_theta =
        assemble_objective(losses, penalties_under(anchored_penalty(theta_next, cfg.gamma, eps), W),
                           tau, lambda_used, rule);

    report.tau_history.push_back(TauRecord{k, lambda_used, tau.tau, scores});
    report.objective_history.push_back(descent.after_theta);
    report.descent.push_back(descent);
    if (spec.keep_iterates) report.iterates.push_back(Iterate{W, theta_next});
    report.iterations_run = k;

    bool converged = false;
    if (mode == Mode::SelfPaced) {
      converged = has_converged(tau, tau_prev.tau, cfg.epsilon);
      lambda = std::min(lambda * cfg.c, cfg.lambda_max);
    } else if (k > 1) {
      converged = (W - W_prev).cwiseAbs().maxCoeff() < cfg.epsilon &&
                  max_abs_change(theta_next, theta) < cfg.epsilon;
    }

    theta = std::move(theta_next);
    W_prev = std::move(W);
    losses_prev = losses;
    tau_prev = std::move(tau);
    if (converged) {
      report.converged = true;
      break;
    }
  }
  report.W = std::move(W_prev);
  report.theta = std::move(theta);
  return report;
}

}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::MMTL: return "MMTL";
    case Variant::MTFL: return "MTFL";
    case Variant::MTASO: return "MTASO";
  }
  return "?";
}

void validate(const AlgorithmSpec& spec, Index d) {
  check_invariants(spec.pacing);
  if (spec.variant == Variant::MTASO) {
    if (!spec.pacing.h) throw InvalidArgument("MTASO needs the subspace dimension h");
    if (*spec.pacing.h < 1 || *spec.pacing.h > d) {
      std::ostringstream os;
      os << "MTASO subspace dimension h=" << *spec.pacing.h << " must lie in [1, " << d << "]";
      throw InvalidArgument(os.str());
    }
  }
  if (spec.theta0) {
    const bool matches =
        (spec.variant == Variant::MMTL && std::holds_alternative<MeanVector>(*spec.theta0)) ||
        (spec.variant == Variant::MTFL && std::holds_alternative<FeatureMatrix>(*spec.theta0)) ||
        (spec.variant == Variant::MTASO && std::holds_alternative<Subspace>(*spec.theta0));
    if (!matches) throw InvalidArgument("theta0 does not match the algorithm variant");
  }
}

SharedKnowledge default_theta0(Variant variant, Index d, std::optional<int> h,
                               std::uint64_t seed) {
  switch (variant) {
    case Variant::MMTL:
      return MeanVector{Vector::Zero(d)};
    case Variant::MTFL:
      return FeatureMatrix{Matrix::Identity(d, d) / static_cast<double>(d)};
    case Variant::MTASO: {
      if (!h || *h < 1 || *h > d) throw InvalidArgument("MTASO needs 1 <= h <= d");
      Rng rng = make_rng(seed, Stream::kInit);
      std::normal_distribution<double> normal(0.0, 1.0);
      Matrix G(d, *h);
      for (Index j = 0; j < G.cols(); ++j) {
        for (Index i = 0; i < G.rows(); ++i) G(i, j) = normal(rng);
      }
      Eigen::HouseholderQR<Matrix> qr(G);
      const Matrix Q = qr.householderQ() * Matrix::Identity(d, *h);
      return Subspace{Q.transpose()};
    }
  }
  throw InvalidArgument("unknown variant");
}

TrainReport fit_self_paced(const MultitaskDataset& data, const AlgorithmSpec& spec) {
  if (!spec.self_paced) throw InvalidArgument("fit_self_paced needs self_paced = true");
  return alternate(data, spec, Mode::SelfPaced);
}

TrainReport fit_baseline_mtl(const MultitaskDataset& data, const AlgorithmSpec& spec) {
  if (spec.self_paced) throw InvalidArgument("fit_baseline_mtl needs self_paced = false");
  return alternate(data, spec, Mode::Baseline);
}

TrainReport fit(const MultitaskDataset& data, const AlgorithmSpec& spec) {
  return spec.self_paced ? fit_self_paced(data, spec) : fit_baseline_mtl(data, spec);
}

ModelParams fit_itl(const MultitaskDataset& data, double gamma, Execution exec) {
  const TaskBatch batch(data);
  return solve_all(batch, AnchoredPenalty::ridge(data.dim(), gamma), exec);
}

Vector fit_stl(const MultitaskDataset& data, double gamma) {
  const TaskKind kind = data[0].kind;
  for (const auto& task : data.tasks()) {
    if (task.kind != kind) throw InvalidArgument("fit_stl: tasks have mixed kinds");
  }
  Matrix X(data.total_examples(), data.dim());
  Vector y(data.total_examples());
  Index row = 0;
  for (const auto& task : data.tasks()) {
    X.middleRows(row, task.size()) = task.X;
    y.segment(row, task.size()) = task.y;
    row += task.size();
  }
  const TaskDataset pooled{0, std::move(X), std::move(y), kind};
  return solve_penalized(pooled, AnchoredPenalty::ridge(data.dim(), gamma));
}

CurriculumResult fit_curriculum(const MultitaskDataset& data, double gamma) {
  const Index T = data.num_tasks();
  const Index d = data.dim();
  const TaskBatch batch(data);

  // Candidates are scanned in increasing task_id so strict '<' breaks ties
  // toward the lowest id.
  std::vector<Index> remaining(static_cast<std::size_t>(T));
  for (Index t = 0; t < T; ++t) remaining[static_cast<std::size_t>(t)] = t;
  std::sort(remaining.begin(), remaining.end(), [&](Index a, Index b) {
    return data[static_cast<std::size_t>(a)].task_id < data[static_cast<std::size_t>(b)].task_id;
  });

  CurriculumResult result{{}, ModelParams::Zero(d, T)};
  AnchoredPenalty anchor = AnchoredPenalty::ridge(d, gamma);
  while (!remaining.empty()) {
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    Vector best_w;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      const auto t = static_cast<std::size_t>(remaining[i]);
      Vector w = batch.solve(t, anchor);
      const double value = penalized_objective(data[t], anchor, w);
      if (value < best_value) {
        best = i;
        best_value = value;
        best_w = std::move(w);
      }
    }
    const Index chosen = remaining[best];
    result.order.push_back(chosen);
    result.W.col(chosen) = best_w;
    anchor.anchor = best_w;
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return result;
}

double objective_value(const MultitaskDataset& data, const ModelParams& W,
                       const TaskWeights& tau, const SharedKnowledge& theta, double gamma,
                       double lambda, TauRule rule, double eps) {
  if (W.rows() != data.dim() || W.cols() != data.num_tasks() ||
      tau.size() != data.num_tasks() || knowledge_dim(theta) != data.dim()) {
    throw DimensionError("objective_value: inconsistent dimensions");
  }
  const Vector losses = serial::task_losses(data, W);
  const Vector penalties = penalties_under(anchored_penalty(theta, gamma, eps), W);
  return assemble_objective(losses, penalties, tau, lambda, rule);
}

Vector predict(const Vector& w, const Matrix& X) {
  if (X.cols() != w.size()) {
    throw DimensionError("predict: X has " + std::to_string(X.cols()) +
                         " columns, model has " + std::to_string(w.size()));
  }
  return X * w;
}

std::vector<Vector> predict(const ModelParams& W, const MultitaskDataset& data) {
  if (W.cols() != data.num_tasks()) {
    throw DimensionError("predict: model has " + std::to_string(W.cols()) +
                         " columns for " + std::to_string(data.num_tasks()) + " tasks");
  }
  std::vector<Vector> out;
  out.reserve(data.tasks().size());
  for (std::size_t t = 0; t < data.tasks().size(); ++t) {
    out.push_back(predict(W.col(static_cast<Index>(t)), data[t].X));
  }
  return out;
}

}  // namespace spmtl
