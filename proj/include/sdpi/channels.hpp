#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sdpi/probcore.hpp"

namespace sdpi {

/// Row-stochastic matrix P_{Y|X}: row x is the output law given input x.
class Channel {
 public:
  static constexpr double kRowTolerance = 1e-12;

  explicit Channel(Eigen::MatrixXd matrix);

  static Channel identity(Index n);
  /// Every row equal to `row`.
  static Channel constant(Index inputs, const Distribution& row);

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  Index input_size() const { return matrix_.rows(); }
  Index output_size() const { return matrix_.cols(); }
  double operator()(Index x, Index y) const { return matrix_(x, y); }
  Distribution row(Index x) const { return Distribution(matrix_.row(x).transpose()); }

 private:
  Eigen::MatrixXd matrix_;
};

/// Joint law P_XY as a |X| x |Y| matrix of unit mass.
class JointDistribution {
 public:
  static constexpr double kMassTolerance = 1e-9;

  explicit JointDistribution(Eigen::MatrixXd matrix);

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  Index rows() const { return matrix_.rows(); }
  Index cols() const { return matrix_.cols(); }

  Distribution row_marginal() const;
  Distribution col_marginal() const;
  /// P_{Y|X}; rows of zero mass are filled with the column marginal.
  Channel conditional() const;

 private:
  Eigen::MatrixXd matrix_;
};

/// Default cap on the number of matrix entries a tensor product may create.
inline constexpr Index kDefaultTensorCap = Index(1) << 20;

/// Output law W o p.
Distribution push_forward(const Channel& w, const Distribution& p);

/// Serial composition: first w1, then w2.
Channel compose(const Channel& w2, const Channel& w1);

/// Kronecker product; input (x1, x2) maps to index x1 * |X2| + x2.
Channel tensor(const Channel& w1, const Channel& w2, Index cap = kDefaultTensorCap);

/// n-fold tensor power of w.
Channel tensor_power(const Channel& w, int n, Index cap = kDefaultTensorCap);

/// Binary symmetric channel with crossover delta.
Channel make_bsc(double delta);

/// q-ary erasure channel: q inputs, q + 1 outputs, erasure symbol last.
Channel make_ec(int q, double delta);

/// P_X x P_{Y|X}.
JointDistribution joint(const Distribution& p, const Channel& w);

/// Big-endian multi-index helpers: digits (x_1, ..., x_n) over `radices`
/// map to sum_j x_j * prod_{k > j} radix_k.
Index encode_multi_index(const std::vector<Index>& digits, const std::vector<Index>& radices);
std::vector<Index> decode_multi_index(Index code, const std::vector<Index>& radices);

}  // namespace sdpi
