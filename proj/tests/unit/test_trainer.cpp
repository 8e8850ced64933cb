#include <cmath>
#include <limits>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "spmtl/knowledge.hpp"
#include "spmtl/loss.hpp"
#include "spmtl/methods.hpp"
#include "spmtl/trainer.hpp"

using namespace spmtl;

namespace {

AlgorithmSpec spec_for(Variant v, bool self_paced, TauRule rule = TauRule::Entropy) {
  AlgorithmSpec s;
  s.variant = v;
  s.self_paced = self_paced;
  s.tau_rule = rule;
  s.pacing.gamma = 0.5;
  if (v == Variant::MTASO) s.pacing.h = 2;
  s.seed = 99;
  return s;
}

double theta_distance(const SharedKnowledge& a, const SharedKnowledge& b) {
  if (auto* m = std::get_if<MeanVector>(&a)) return (m->w0 - std::get<MeanVector>(b).w0).cwiseAbs().maxCoeff();
  if (auto* f = std::get_if<FeatureMatrix>(&a)) return (f->D - std::get<FeatureMatrix>(b).D).cwiseAbs().maxCoeff();
  return (std::get<Subspace>(a).U - std::get<Subspace>(b).U).cwiseAbs().maxCoeff();
}

MultitaskDataset identical_tasks(int T, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Matrix X = fixture::gaussian(10, 3, rng);
  const Vector y = fixture::gaussian_vector(10, rng);
  std::vector<TaskDataset> tasks;
  for (int t = 0; t < T; ++t) tasks.push_back(make_task(t + 1, X, y, TaskKind::Regression));
  return MultitaskDataset(std::move(tasks));
}

}  // namespace

TEST(Reduction, HardRuleWithInfiniteThresholdMatchesBaseline) {
  const auto data = fixture::regression(5, 12, 4, 1);
  for (Variant v : {Variant::MMTL, Variant::MTFL, Variant::MTASO}) {
    AlgorithmSpec sp = spec_for(v, true, TauRule::Hard);
    sp.pacing.lambda0 = std::numeric_limits<double>::infinity();
    sp.keep_iterates = true;
    const TrainReport a = fit_self_paced(data, sp);
    for (const auto& rec : a.tau_history) EXPECT_EQ(rec.tau, Vector::Ones(5));

    AlgorithmSpec base = spec_for(v, false);
    base.keep_iterates = true;
    base.pacing.max_outer_iters = a.iterations_run;
    const TrainReport b = fit_baseline_mtl(data, base);
    ASSERT_EQ(a.iterates.size(), b.iterates.size());
    for (std::size_t k = 0; k < a.iterates.size(); ++k) {
      EXPECT_EQ(a.iterates[k].W, b.iterates[k].W) << variant_name(v) << " iteration " << k + 1;
      EXPECT_EQ(theta_distance(a.iterates[k].theta, b.iterates[k].theta), 0.0);
    }
    EXPECT_EQ(a.W, b.W);
  }
}

TEST(SelfPaced, IdenticalTasksKeepUniformTau) {
  const auto data = identical_tasks(4, 2);
  for (Variant v : {Variant::MMTL, Variant::MTFL, Variant::MTASO}) {
    const TrainReport r = fit_self_paced(data, spec_for(v, true));
    for (const auto& rec : r.tau_history) {
      EXPECT_LT((rec.tau - Vector::Constant(4, 0.25)).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(SelfPaced, BlockDescentEntropy) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto data = fixture::regression(6, 10, 5, 10 + seed);
    for (Variant v : {Variant::MMTL, Variant::MTFL, Variant::MTASO}) {
      const TrainReport r = fit_self_paced(data, spec_for(v, true));
      for (std::size_t k = 0; k < r.descent.size(); ++k) {
        const DescentRecord& dr = r.descent[k];
        const double slack = 1e-9 * std::max(1.0, std::abs(dr.after_w));
        if (k > 0) EXPECT_LE(dr.after_w, dr.before_w + slack) << variant_name(v) << " k=" << k + 1;
        EXPECT_LE(dr.after_tau, dr.after_w + slack);
        EXPECT_LE(dr.after_theta, dr.after_tau + slack) << variant_name(v) << " k=" << k + 1;
      }
    }
  }
}

TEST(SelfPaced, ReportShapeAndGeometricSchedule) {
  const auto data = fixture::regression(6, 10, 4, 3);
  AlgorithmSpec s = spec_for(Variant::MTFL, true);
  s.pacing.lambda0 = 0.25;
  const TrainReport r = fit_self_paced(data, s);
  EXPECT_EQ(static_cast<int>(r.tau_history.size()), r.iterations_run);
  EXPECT_EQ(r.objective_history.size(), r.tau_history.size());
  const auto schedule = r.lambda_schedule();
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    EXPECT_NEAR(schedule[k], 0.25 * std::pow(1.1, static_cast<double>(k)), 1e-12);
    EXPECT_EQ(r.tau_history[k].iteration, static_cast<int>(k) + 1);
  }
  EXPECT_EQ(r.W.cols(), 6);
  EXPECT_NO_THROW(check_invariants(r.theta));
}

TEST(SelfPaced, DefaultThresholdIsMedianOfFirstScores) {
  const auto data = fixture::regression(5, 10, 3, 4);
  AlgorithmSpec s = spec_for(Variant::MMTL, true);
  s.pacing.lambda0_scale = 2.0;
  const TrainReport r = fit_self_paced(data, s);
  Vector scores = r.tau_history[0].scores;
  std::sort(scores.data(), scores.data() + scores.size());
  EXPECT_DOUBLE_EQ(r.tau_history[0].lambda, 2.0 * scores[2]);
}

TEST(SelfPaced, EntropyTauApproachesUniform) {
  const auto data = fixture::regression(6, 10, 4, 5);
  AlgorithmSpec s = spec_for(Variant::MTFL, true);
  s.pacing.epsilon = 1e-14;
  s.pacing.max_outer_iters = 40;
  s.pacing.c = 1.5;
  const TrainReport r = fit_self_paced(data, s);
  ASSERT_GE(r.tau_history.size(), 3u);
  const std::size_t n = r.tau_history.size();
  auto spread = [&](std::size_t k) {
    return (r.tau_history[k].tau.array() - 1.0 / 6.0).abs().maxCoeff();
  };
  EXPECT_LE(spread(n - 1), spread(n - 2));
  EXPECT_LE(spread(n - 2), spread(n - 3));
}

TEST(SelfPaced, Deterministic) {
  const auto data = fixture::regression(6, 10, 4, 6);
  for (Variant v : {Variant::MMTL, Variant::MTFL, Variant::MTASO}) {
    const TrainReport a = fit_self_paced(data, spec_for(v, true));
    const TrainReport b = fit_self_paced(data, spec_for(v, true));
    EXPECT_EQ(a.W, b.W);
    EXPECT_EQ(a.objective_history, b.objective_history);
    AlgorithmSpec serial = spec_for(v, true);
    serial.execution = Execution::Serial;
    EXPECT_EQ(fit_self_paced(data, serial).W, a.W);
  }
}

TEST(SelfPaced, ConvergesWhenTauStops) {
  // Hard rule with every task admitted: tau^(1) = tau^(2) = 1, so the test fires at k = 2.
  const auto data = fixture::regression(4, 10, 3, 7);
  AlgorithmSpec s = spec_for(Variant::MMTL, true, TauRule::Hard);
  s.pacing.lambda0 = 1e12;
  const TrainReport r = fit_self_paced(data, s);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations_run, 2);
}

TEST(SelfPaced, ClassificationTasks) {
  const auto data = fixture::classification(4, 30, 3, 8);
  for (Variant v : {Variant::MMTL, Variant::MTFL, Variant::MTASO}) {
    const TrainReport r = fit_self_paced(data, spec_for(v, true));
    EXPECT_TRUE(r.W.allFinite());
  }
}

TEST(Baseline, SingleTaskMeanFixedPoint) {
  const auto data = fixture::regression(1, 20, 3, 9);
  AlgorithmSpec s = spec_for(Variant::MMTL, false);
  s.pacing.max_outer_iters = 5000;
  s.pacing.epsilon = 1e-12;
  const TrainReport r = fit_baseline_mtl(data, s);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(std::get<MeanVector>(r.theta).w0, r.W.col(0));
  const Vector ls = data[0].X.colPivHouseholderQr().solve(data[0].y);
  EXPECT_LT((r.W.col(0) - ls).norm(), 1e-8);
}

TEST(Baseline, OrthonormalTasksKeepIsotropicFeatureMatrix) {
  const Index d = 4;
  std::vector<TaskDataset> tasks;
  for (int t = 0; t < d; ++t) {
    tasks.push_back(make_task(t + 1, Matrix::Identity(d, d), 2.0 * Vector::Unit(d, t),
                              TaskKind::Regression));
  }
  const TrainReport r = fit_baseline_mtl(MultitaskDataset(std::move(tasks)),
                                         spec_for(Variant::MTFL, false));
  EXPECT_LT((std::get<FeatureMatrix>(r.theta).D - Matrix::Identity(d, d) / d).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(Baseline, TauPinnedToOnes) {
  const auto data = fixture::regression(3, 10, 3, 10);
  const TrainReport r = fit_baseline_mtl(data, spec_for(Variant::MTASO, false));
  for (const auto& rec : r.tau_history) {
    EXPECT_EQ(rec.tau, Vector::Ones(3));
    EXPECT_EQ(rec.lambda, 0.0);
  }
}

TEST(Spec, Validation) {
  AlgorithmSpec s = spec_for(Variant::MTASO, false);
  s.pacing.h.reset();
  EXPECT_THROW(validate(s, 4), InvalidArgument);
  s.pacing.h = 5;
  EXPECT_THROW(validate(s, 4), InvalidArgument);
  s.pacing.h = 2;
  s.theta0 = MeanVector{Vector::Zero(4)};
  EXPECT_THROW(validate(s, 4), InvalidArgument);
  AlgorithmSpec bad = spec_for(Variant::MMTL, true);
  bad.pacing.c = 0.9;
  EXPECT_THROW(validate(bad, 4), InvalidArgument);
  EXPECT_THROW(fit_self_paced(fixture::regression(2, 5, 4, 1), spec_for(Variant::MMTL, false)),
               InvalidArgument);
}

TEST(Spec, DefaultInitialKnowledge) {
  EXPECT_EQ(std::get<MeanVector>(default_theta0(Variant::MMTL, 3, {}, 0)).w0, Vector::Zero(3));
  EXPECT_EQ(std::get<FeatureMatrix>(default_theta0(Variant::MTFL, 4, {}, 0)).D,
            Matrix::Identity(4, 4) / 4.0);
  const SharedKnowledge u = default_theta0(Variant::MTASO, 6, 3, 17);
  EXPECT_NO_THROW(check_invariants(u));
  EXPECT_EQ(std::get<Subspace>(u).h(), 3);
  EXPECT_EQ(std::get<Subspace>(u).U, std::get<Subspace>(default_theta0(Variant::MTASO, 6, 3, 17)).U);
  EXPECT_NE(std::get<Subspace>(u).U, std::get<Subspace>(default_theta0(Variant::MTASO, 6, 3, 18)).U);
}

TEST(Itl, MatchesPerTaskOracle) {
  const auto data = fixture::regression(4, 8, 3, 11);
  const ModelParams W = fit_itl(data, 0.3);
  for (std::size_t t = 0; t < 4; ++t) {
    const Vector ref = oracle::gd_least_squares(data[t].X, data[t].y, Matrix::Identity(3, 3),
                                                Vector::Zero(3), 0.3);
    EXPECT_LT((W.col(static_cast<Index>(t)) - ref).cwiseAbs().maxCoeff(), 1e-6);
  }
  const ModelParams same = fit_itl(identical_tasks(3, 12), 0.3);
  EXPECT_EQ(same.col(0), same.col(1));
  EXPECT_EQ(same.col(1), same.col(2));
}

TEST(Stl, PooledModel) {
  const auto one = fixture::regression(1, 8, 3, 13);
  EXPECT_LT((fit_stl(one, 0.4) - fit_itl(one, 0.4).col(0)).norm(), 1e-12);

  const auto data = fixture::regression(3, 8, 3, 14);
  Matrix X(24, 3);
  Vector y(24);
  for (Index t = 0; t < 3; ++t) {
    X.middleRows(8 * t, 8) = data[static_cast<std::size_t>(t)].X;
    y.segment(8 * t, 8) = data[static_cast<std::size_t>(t)].y;
  }
  const Vector ref = oracle::gd_least_squares(X, y, Matrix::Identity(3, 3), Vector::Zero(3), 0.4);
  EXPECT_LT((fit_stl(data, 0.4) - ref).cwiseAbs().maxCoeff(), 1e-6);

  const auto twins = identical_tasks(2, 15);
  const MultitaskDataset single({twins[0]});
  EXPECT_LT((fit_stl(twins, 0.4) - fit_stl(single, 0.4)).norm(), 1e-12);
}

TEST(Stl, MixedKindsThrow) {
  const auto reg = fixture::regression(1, 6, 3, 16);
  const auto cls = fixture::classification(1, 6, 3, 17);
  TaskDataset c = cls[0];
  c.task_id = 2;
  EXPECT_THROW(fit_stl(MultitaskDataset({reg[0], c}), 1.0), InvalidArgument);
}

TEST(Curriculum, IdenticalTasksFollowIdOrder) {
  const CurriculumResult r = fit_curriculum(identical_tasks(5, 18), 0.5);
  EXPECT_EQ(r.order, (std::vector<Index>{0, 1, 2, 3, 4}));
}

TEST(Curriculum, CleanTaskChosenFirst) {
  std::mt19937_64 rng(19);
  std::vector<TaskDataset> tasks;
  const Vector w = fixture::gaussian_vector(3, rng);
  for (int t = 0; t < 5; ++t) {
    const Matrix X = fixture::gaussian(12, 3, rng);
    Vector y = X * w;
    const double noise = t == 3 ? 1e-6 : 2.0;
    y += noise * fixture::gaussian_vector(12, rng);
    tasks.push_back(make_task(t + 1, X, y, TaskKind::Regression));
  }
  const MultitaskDataset data(std::move(tasks));
  const double gamma = 0.1;
  // Brute force over all first-step objectives with an independent solver.
  Index best = -1;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < 5; ++t) {
    const Vector v = oracle::gd_least_squares(data[t].X, data[t].y, Matrix::Identity(3, 3),
                                              Vector::Zero(3), gamma);
    const double value = task_average_loss(data[t], v) + gamma * v.squaredNorm();
    if (value < best_value) {
      best_value = value;
      best = static_cast<Index>(t);
    }
  }
  const CurriculumResult r = fit_curriculum(data, gamma);
  EXPECT_EQ(best, 3);
  EXPECT_EQ(r.order.front(), best);
  std::set<Index> seen(r.order.begin(), r.order.end());
  EXPECT_EQ(seen.size(), 5u);
  EXPECT_EQ(*seen.begin(), 0);
  EXPECT_EQ(*seen.rbegin(), 4);
}

TEST(Objective, Examples) {
  const auto data = identical_tasks(4, 20);
  const Vector w = data[0].X.colPivHouseholderQr().solve(data[0].y);
  // Replace targets so every task is fit exactly.
  std::vector<TaskDataset> exact;
  for (int t = 0; t < 4; ++t) exact.push_back(make_task(t + 1, data[0].X, data[0].X * w, TaskKind::Regression));
  const MultitaskDataset zero_loss(std::move(exact));
  const ModelParams W = w.replicate(1, 4);
  const SharedKnowledge theta = MeanVector{w};
  const double lambda = 0.7;
  const TaskWeights uniform{Vector::Constant(4, 0.25), TauMode::Entropy};
  EXPECT_NEAR(objective_value(zero_loss, W, uniform, theta, 1.0, lambda, TauRule::Entropy),
              -lambda * std::log(4.0), 1e-12);
  const TaskWeights ones{Vector::Ones(4), TauMode::Hard};
  EXPECT_NEAR(objective_value(zero_loss, W, ones, theta, 1.0, lambda, TauRule::Hard), -lambda * 4.0,
              1e-12);
}

TEST(Objective, AdditiveOverTasks) {
  std::mt19937_64 rng(21);
  const auto data = fixture::regression(5, 8, 3, 21);
  const ModelParams W = fixture::gaussian(3, 5, rng);
  const Vector tau = fixture::random_simplex(5, rng);
  const SharedKnowledge theta = MeanVector{fixture::gaussian_vector(3, rng)};
  double sum = 0.0;
  for (std::size_t t = 0; t < 5; ++t) {
    const auto ti = static_cast<Index>(t);
    sum += tau[ti] * task_score(data[t], W.col(ti), theta, 0.6);
  }
  EXPECT_NEAR(objective_value(data, W, TaskWeights{tau, TauMode::Entropy}, theta, 0.6, 0.0,
                              TauRule::Entropy),
              sum, 1e-12);
  EXPECT_THROW(objective_value(data, W.leftCols(4), TaskWeights{tau, TauMode::Entropy}, theta, 0.6,
                               0.0, TauRule::Entropy),
               DimensionError);
}

TEST(Predict, Examples) {
  std::mt19937_64 rng(22);
  const Matrix X = fixture::gaussian(5, 3, rng);
  const Vector w = fixture::gaussian_vector(3, rng);
  EXPECT_EQ(predict(Vector::Zero(3), X), Vector::Zero(5));
  EXPECT_EQ(predict(w, Matrix::Identity(3, 3)), w);
  EXPECT_LT((predict(2.5 * w, X) - 2.5 * predict(w, X)).norm(), 1e-12);
  EXPECT_THROW(predict(Vector::Zero(4), X), DimensionError);
}

TEST(Methods, NamesAndBaselines) {
  for (const auto& name : known_method_names()) EXPECT_EQ(method_by_name(name).name, name);
  EXPECT_THROW(method_by_name("spSTL"), InvalidArgument);
  EXPECT_EQ(baseline_of("spMTFL"), std::optional<std::string>("MTFL"));
  EXPECT_FALSE(baseline_of("MTFL"));
  const Method m = method_by_name("spMTASO");
  EXPECT_EQ(m.kind, MethodKind::MTL);
  EXPECT_TRUE(m.spec.self_paced);
  EXPECT_EQ(m.spec.variant, Variant::MTASO);
  EXPECT_TRUE(parameter_applies(m, "h"));
  EXPECT_TRUE(parameter_applies(m, "lambda0_scale"));
  EXPECT_FALSE(parameter_applies(method_by_name("MTASO"), "lambda0_scale"));
  EXPECT_FALSE(parameter_applies(method_by_name("ITL"), "h"));
  EXPECT_TRUE(parameter_applies(method_by_name("ITL"), "gamma"));
}

TEST(Methods, ApplyParameter) {
  Method m = method_by_name("spMMTL");
  apply_parameter(m, "lambda0", 3.0);
  EXPECT_EQ(m.spec.pacing.lambda0, 3.0);
  apply_parameter(m, "lambda0_scale", 0.5);
  EXPECT_FALSE(m.spec.pacing.lambda0);
  apply_parameter(m, "h", 2.6);
  EXPECT_EQ(m.spec.pacing.h, 3);
  EXPECT_THROW(apply_parameter(m, "nope", 1.0), InvalidArgument);
}

TEST(Methods, FitMethodShapes) {
  const auto data = fixture::regression(4, 10, 3, 23);
  const FitResult stl = fit_method(data, method_by_name("STL"));
  EXPECT_EQ(stl.W.cols(), 4);
  EXPECT_EQ(stl.W.col(0), stl.W.col(3));
  EXPECT_EQ(fit_method(data, method_by_name("CL")).order.size(), 4u);
  Method aso = method_by_name("spMTASO");
  aso.spec.pacing.h = 2;
  const FitResult r = fit_method(data, aso);
  ASSERT_TRUE(r.report);
  EXPECT_EQ(r.W, r.report->W);
}
