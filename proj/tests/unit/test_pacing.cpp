#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "spmtl/pacing.hpp"

using namespace spmtl;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST(HardRule, Examples) {
  const TaskWeights t = update_tau_hard(vec({0.5, 1.5}), 1.0, 0.01);
  EXPECT_EQ(t.mode, TauMode::Hard);
  EXPECT_EQ(t.tau, vec({1.0, 0.01}));
  EXPECT_EQ(update_tau_hard(vec({0.1, 0.2, 0.3}), 1.0).tau, Vector::Ones(3));
  EXPECT_EQ(update_tau_hard(vec({1.0}), 1.0, 0.01).tau, vec({0.01}));
}

TEST(HardRule, SelectedSetMonotoneInLambda) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int rep = 0; rep < 50; ++rep) {
    Vector scores(8);
    for (Index i = 0; i < 8; ++i) scores[i] = u(rng);
    Vector prev = update_tau_hard(scores, 0.0).tau;
    for (double lambda = 0.1; lambda < 6.0; lambda += 0.1) {
      const Vector cur = update_tau_hard(scores, lambda).tau;
      for (Index i = 0; i < 8; ++i) {
        if (prev[i] == 1.0) EXPECT_EQ(cur[i], 1.0);
      }
      prev = cur;
    }
  }
}

TEST(EntropyRule, Examples) {
  const TaskWeights uniform = update_tau_entropy(Vector::Constant(5, 2.3), 0.7);
  EXPECT_EQ(uniform.mode, TauMode::Entropy);
  EXPECT_LT((uniform.tau - Vector::Constant(5, 0.2)).cwiseAbs().maxCoeff(), 1e-15);

  const double lambda = 1.7;
  const Vector two = update_tau_entropy(vec({0.0, lambda * std::log(2.0)}), lambda).tau;
  EXPECT_NEAR(two[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(two[1], 1.0 / 3.0, 1e-15);

  const Vector hot = update_tau_entropy(vec({1.0, 2.0, 3.0}), 1e9).tau;
  EXPECT_LT((hot - Vector::Constant(3, 1.0 / 3.0)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(EntropyRule, StableForExtremeScores) {
  const Vector t = update_tau_entropy(vec({1e6, 1e6 + 1.0, 0.0}), 1e-3).tau;
  EXPECT_TRUE(t.allFinite());
  EXPECT_NEAR(t.sum(), 1.0, 1e-12);
  EXPECT_NEAR(t[2], 1.0, 1e-12);
}

TEST(EntropyRule, OrderingShiftInvarianceAndSimplex) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int rep = 0; rep < 50; ++rep) {
    Vector s(6);
    for (Index i = 0; i < 6; ++i) s[i] = u(rng);
    const double lambda = 0.1 + u(rng);
    const Vector t = update_tau_entropy(s, lambda).tau;
    EXPECT_NEAR(t.sum(), 1.0, 1e-12);
    for (Index i = 0; i < 6; ++i) {
      for (Index j = 0; j < 6; ++j) {
        if (s[i] < s[j]) EXPECT_GT(t[i], t[j]);
      }
    }
    const Vector shifted = update_tau_entropy(s.array() + 4.2, lambda).tau;
    EXPECT_LT((t - shifted).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(EntropyRule, MatchesSimplexOptimizer) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int rep = 0; rep < 30; ++rep) {
    const Index T = 2 + rep % 4;
    Vector s(T);
    for (Index i = 0; i < T; ++i) s[i] = u(rng);
    const double lambda = 0.2 + u(rng);
    const Vector t = update_tau_entropy(s, lambda).tau;
    const Vector ref = oracle::simplex_entropy_minimize(s, lambda);
    EXPECT_LT((t - ref).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE(oracle::entropy_objective(t, s, lambda),
              oracle::entropy_objective(ref, s, lambda) + 1e-12);
  }
}

TEST(Entropy, Examples) {
  EXPECT_NEAR(entropy(TaskWeights{Vector::Constant(4, 0.25), TauMode::Entropy}), std::log(4.0), 1e-15);
  EXPECT_NEAR(entropy(TaskWeights{vec({2.0 / 3.0, 1.0 / 3.0}), TauMode::Entropy}), 0.6365, 1e-4);
  EXPECT_LT(entropy(TaskWeights{vec({1.0 - 2e-12, 1e-12, 1e-12}), TauMode::Entropy}), 1e-9);
  EXPECT_THROW(entropy(TaskWeights{Vector::Ones(2), TauMode::Hard}), InvalidArgument);
}

TEST(Entropy, MaximalAtUniform) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    const Vector t = fixture::random_simplex(5, rng);
    EXPECT_LE(entropy(TaskWeights{t, TauMode::Entropy}), std::log(5.0) + 1e-15);
  }
}

TEST(AdvanceLambda, Examples) {
  const PacingState s{1.0, 1, {}};
  const PacingState next = advance_lambda(s, 1.1);
  EXPECT_DOUBLE_EQ(next.lambda, 1.1);
  EXPECT_EQ(next.iteration, 2);
  PacingState t = s;
  for (int i = 0; i < 3; ++i) t = advance_lambda(t, 2.0);
  EXPECT_DOUBLE_EQ(t.lambda, 8.0);
  EXPECT_EQ(t.iteration, 4);
}

TEST(AdvanceLambda, GeometricSequence) {
  PacingState s{0.37, 1, {}};
  for (int k = 1; k <= 40; ++k) {
    EXPECT_NEAR(s.lambda, 0.37 * std::pow(1.1, k - 1), 1e-12 * s.lambda);
    s = advance_lambda(s, 1.1);
  }
}

TEST(Convergence, Examples) {
  const Vector a = vec({0.3, 0.7});
  EXPECT_TRUE(has_converged(TaskWeights{a, TauMode::Entropy}, a, 1e-300));
  EXPECT_FALSE(has_converged(TaskWeights{vec({1.0, 0.01}), TauMode::Hard}, vec({1.0, 1.0}), 0.5));
  EXPECT_TRUE(has_converged(TaskWeights{vec({1.0, 0.5}), TauMode::Hard}, vec({1.0, 1.0}), 0.25));
  EXPECT_THROW(has_converged(TaskWeights{a, TauMode::Entropy}, Vector::Ones(3), 1.0), DimensionError);
}

TEST(Helpers, InitialTauAndMedian) {
  EXPECT_EQ(initial_tau(4), Vector::Constant(4, 0.25));
  EXPECT_DOUBLE_EQ(median(vec({3.0, 1.0, 2.0})), 2.0);
  EXPECT_DOUBLE_EQ(median(vec({4.0, 1.0, 3.0, 2.0})), 2.5);
}
