#include <omp.h>

#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "spmtl/kernels.hpp"
#include "spmtl/loss.hpp"

using namespace spmtl;

class KernelsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    saved_ = omp_get_max_threads();
    omp_set_num_threads(4);
  }
  void TearDown() override { omp_set_num_threads(saved_); }

 private:
  int saved_ = 1;
};

TEST_F(KernelsTest, SolveAllIdenticalRegression) {
  const auto data = fixture::regression(17, 12, 6, 1);
  const TaskBatch batch(data);
  std::mt19937_64 rng(1);
  const Matrix A = fixture::gaussian(6, 6, rng);
  const AnchoredPenalty pen{A * A.transpose(), fixture::gaussian_vector(6, rng), 0.4};
  const ModelParams a = serial::solve_all(batch, pen);
  const ModelParams b = omp::solve_all(batch, pen);
  EXPECT_EQ(a, b);
  for (std::size_t t = 0; t < 17; ++t) {
    EXPECT_EQ(a.col(static_cast<Index>(t)), solve_penalized(data[t], pen));
  }
}

TEST_F(KernelsTest, SolveAllIdenticalClassification) {
  const auto data = fixture::classification(9, 30, 4, 2);
  const TaskBatch batch(data);
  const AnchoredPenalty pen = AnchoredPenalty::ridge(4, 0.2);
  EXPECT_EQ(serial::solve_all(batch, pen), omp::solve_all(batch, pen));
}

TEST_F(KernelsTest, TaskLossesIdentical) {
  const auto data = fixture::regression(11, 8, 5, 3);
  std::mt19937_64 rng(3);
  const ModelParams W = fixture::gaussian(5, 11, rng);
  const Vector a = serial::task_losses(data, W);
  EXPECT_EQ(a, omp::task_losses(data, W));
  for (Index t = 0; t < 11; ++t) {
    EXPECT_DOUBLE_EQ(a[t], task_average_loss(data[static_cast<std::size_t>(t)], W.col(t)));
  }
}

TEST_F(KernelsTest, WeightedCovarianceIdenticalAndCorrect) {
  std::mt19937_64 rng(4);
  for (Index d : {1, 3, 17, 40}) {
    const ModelParams W = fixture::gaussian(d, 13, rng);
    const Vector tau = fixture::random_simplex(13, rng);
    const Matrix a = serial::weighted_covariance(W, tau);
    EXPECT_EQ(a, omp::weighted_covariance(W, tau));
    const Matrix ref = W * tau.asDiagonal() * W.transpose();
    EXPECT_LT((a - ref).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(a, a.transpose());
  }
}

TEST_F(KernelsTest, DispatchSelectsImplementation) {
  const auto data = fixture::regression(5, 10, 3, 5);
  const TaskBatch batch(data);
  const AnchoredPenalty pen = AnchoredPenalty::ridge(3, 1.0);
  EXPECT_EQ(solve_all(batch, pen, Execution::Serial), solve_all(batch, pen, Execution::Parallel));
}

TEST_F(KernelsTest, ErrorsPropagateFromParallelRegion) {
  const auto data = fixture::regression(8, 10, 3, 6);
  const TaskBatch batch(data);
  const AnchoredPenalty wrong = AnchoredPenalty::ridge(4, 1.0);
  EXPECT_THROW(serial::solve_all(batch, wrong), DimensionError);
  EXPECT_THROW(omp::solve_all(batch, wrong), DimensionError);
}

TEST_F(KernelsTest, BatchCachesNormalEquations) {
  const auto data = fixture::regression(3, 10, 4, 7);
  const TaskBatch batch(data);
  EXPECT_EQ(batch.num_tasks(), 3);
  EXPECT_EQ(batch.dim(), 4);
  const NormalEquations ne = NormalEquations::of(data[1]);
  EXPECT_EQ(batch.normal(1).gram, ne.gram);
  EXPECT_EQ(batch.normal(1).moment, ne.moment);
}
