// Small random datasets and parameter matrices for tests.

#ifndef SPMTL_TESTS_FIXTURES_HPP_
#define SPMTL_TESTS_FIXTURES_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "spmtl/types.hpp"

namespace fixture {

using spmtl::Index;
using spmtl::Matrix;
using spmtl::Vector;

inline Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix A(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) A(i, j) = n(rng);
  }
  return A;
}

inline Vector gaussian_vector(Index n, std::mt19937_64& rng) {
  return gaussian(n, 1, rng).col(0);
}

// T regression tasks, n rows each, targets from a random linear model plus
// noise of the given scale (task t gets noise * (1 + t)).
inline spmtl::MultitaskDataset regression(int T, Index n, Index d, std::uint64_t seed,
                                          double noise = 0.5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  const Vector shared = gaussian_vector(d, rng);
  std::vector<spmtl::TaskDataset> tasks;
  for (int t = 0; t < T; ++t) {
    Matrix X = gaussian(n, d, rng);
    const Vector w = shared + 0.3 * gaussian_vector(d, rng);
    Vector y = X * w;
    for (Index i = 0; i < n; ++i) y[i] += noise * (1.0 + t) * z(rng);
    tasks.push_back(spmtl::make_task(t + 1, std::move(X), std::move(y),
                                     spmtl::TaskKind::Regression));
  }
  return spmtl::MultitaskDataset(std::move(tasks));
}

inline spmtl::MultitaskDataset classification(int T, Index n, Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Vector shared = gaussian_vector(d, rng);
  std::vector<spmtl::TaskDataset> tasks;
  for (int t = 0; t < T; ++t) {
    Matrix X = gaussian(n, d, rng);
    const Vector w = shared + 0.3 * gaussian_vector(d, rng);
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
      const double p = 1.0 / (1.0 + std::exp(-X.row(i).dot(w)));
      y[i] = u(rng) < p ? 1.0 : -1.0;
    }
    y[0] = 1.0;
    y[1] = -1.0;
    tasks.push_back(spmtl::make_task(t + 1, std::move(X), std::move(y),
                                     spmtl::TaskKind::BinaryClassification));
  }
  return spmtl::MultitaskDataset(std::move(tasks));
}

inline Vector random_simplex(Index T, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Vector v(T);
  for (Index t = 0; t < T; ++t) v[t] = u(rng);
  return v / v.sum();
}

}  // namespace fixture

#endif  // SPMTL_TESTS_FIXTURES_HPP_
