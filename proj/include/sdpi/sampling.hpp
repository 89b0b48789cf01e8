#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace sdpi {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; derives independent per-shard seeds from one seed.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t shard) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (shard + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Dirichlet(alpha, ..., alpha) draw. Falls back to a uniformly chosen
/// vertex when every gamma variate underflows (tiny alpha).
inline Eigen::VectorXd sample_dirichlet(Eigen::Index n, double alpha, Rng& rng) {
  std::gamma_distribution<double> gamma(alpha, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = gamma(rng);
  const double total = v.sum();
  if (!(total > 0.0)) {
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    v.setZero();
    v[pick(rng)] = 1.0;
    return v;
  }
  v /= total;
  return v;
}

/// Row-stochastic matrix with independent Dirichlet(alpha) rows.
inline Eigen::MatrixXd sample_stochastic_matrix(Eigen::Index rows, Eigen::Index cols,
                                                double alpha, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    m.row(i) = sample_dirichlet(cols, alpha, rng).transpose();
  }
  return m;
}

}  // namespace sdpi
