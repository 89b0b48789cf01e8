#include "sdpi/channels.hpp"

#include <sstream>

namespace sdpi {
namespace {

constexpr std::string_view kModule = "channels";

}  // namespace

Channel::Channel(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() < 1 || matrix_.cols() < 1) throw Error(kModule, "empty channel matrix");
  if (!matrix_.allFinite() || (matrix_.array() < 0.0).any()) {
    throw Error(kModule, "channel matrix has a negative or non-finite entry");
  }
  for (Index x = 0; x < matrix_.rows(); ++x) {
    const double total = matrix_.row(x).sum();
    if (std::abs(total - 1.0) > kRowTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "row " << x << " sums to " << total << ", not 1 within " << kRowTolerance;
      throw Error(kModule, msg.str());
    }
    matrix_.row(x) /= total;
  }
}

Channel Channel::identity(Index n) {
  if (n < 1) throw Error(kModule, "identity channel needs a positive size");
  return Channel(Eigen::MatrixXd::Identity(n, n));
}

Channel Channel::constant(Index inputs, const Distribution& row) {
  if (inputs < 1) throw Error(kModule, "constant channel needs a positive input size");
  return Channel(Eigen::VectorXd::Ones(inputs) * row.probs().transpose());
}

JointDistribution::JointDistribution(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() < 1 || matrix_.cols() < 1) throw Error(kModule, "empty joint distribution");
  if (!matrix_.allFinite() || (matrix_.array() < 0.0).any()) {
    throw Error(kModule, "joint distribution has a negative or non-finite entry");
  }
  const double total = matrix_.sum();
  if (std::abs(total - 1.0) > kMassTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "joint distribution has mass " << total << ", not 1 within " << kMassTolerance;
    throw Error(kModule, msg.str());
  }
  matrix_ /= total;
}

Distribution JointDistribution::row_marginal() const {
  return Distribution::normalized(matrix_.rowwise().sum());
}

Distribution JointDistribution::col_marginal() const {
  return Distribution::normalized(matrix_.colwise().sum().transpose());
}

Channel JointDistribution::conditional() const {
  const Eigen::VectorXd px = matrix_.rowwise().sum();
  const Eigen::RowVectorXd py = matrix_.colwise().sum() / matrix_.sum();
  Eigen::MatrixXd w(matrix_.rows(), matrix_.cols());
  for (Index x = 0; x < matrix_.rows(); ++x) {
    if (px[x] > 0.0) {
      w.row(x) = matrix_.row(x) / px[x];
      w.row(x) /= w.row(x).sum();
    } else {
      w.row(x) = py;
    }
  }
  return Channel(std::move(w));
}

Distribution push_forward(const Channel& w, const Distribution& p) {
  if (p.size() != w.input_size()) {
    std::ostringstream msg;
    msg << "push_forward size mismatch: distribution over " << p.size()
        << " symbols, channel input size " << w.input_size();
    throw Error(kModule, msg.str());
  }
  return Distribution::normalized(w.matrix().transpose() * p.probs());
}

Channel compose(const Channel& w2, const Channel& w1) {
  if (w1.output_size() != w2.input_size()) {
    std::ostringstream msg;
    msg << "compose size mismatch: first channel outputs " << w1.output_size()
        << " symbols, second accepts " << w2.input_size();
    throw Error(kModule, msg.str());
  }
  Eigen::MatrixXd product = w1.matrix() * w2.matrix();
  for (Index x = 0; x < product.rows(); ++x) product.row(x) /= product.row(x).sum();
  return Channel(std::move(product));
}

Channel tensor(const Channel& w1, const Channel& w2, Index cap) {
  const Index rows = w1.input_size() * w2.input_size();
  const Index cols = w1.output_size() * w2.output_size();
  if (rows > cap / cols) {
    std::ostringstream msg;
    msg << "tensor product of size " << rows << "x" << cols << " exceeds the cap of "
        << cap << " entries";
    throw Error(kModule, msg.str());
  }
  Eigen::MatrixXd m(rows, cols);
  const Index r2 = w2.input_size();
  const Index c2 = w2.output_size();
  for (Index a = 0; a < w1.input_size(); ++a) {
    for (Index b = 0; b < w1.output_size(); ++b) {
      m.block(a * r2, b * c2, r2, c2) = w1(a, b) * w2.matrix();
    }
  }
  return Channel(std::move(m));
}

Channel tensor_power(const Channel& w, int n, Index cap) {
  if (n < 1) throw Error(kModule, "tensor power needs n >= 1");
  Channel result = w;
  for (int k = 1; k < n; ++k) result = tensor(result, w, cap);
  return result;
}

Channel make_bsc(double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw Error(kModule, "BSC crossover outside [0,1]");
  Eigen::MatrixXd m(2, 2);
  m << 1.0 - delta, delta, delta, 1.0 - delta;
  return Channel(std::move(m));
}

Channel make_ec(int q, double delta) {
  if (q < 2) throw Error(kModule, "erasure channel needs q >= 2");
  if (!(delta >= 0.0 && delta <= 1.0)) throw Error(kModule, "erasure probability outside [0,1]");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(q, q + 1);
  for (int x = 0; x < q; ++x) {
    m(x, x) = 1.0 - delta;
    m(x, q) = delta;
  }
  return Channel(std::move(m));
}

JointDistribution joint(const Distribution& p, const Channel& w) {
  if (p.size() != w.input_size()) {
    std::ostringstream msg;
    msg << "joint size mismatch: distribution over " << p.size()
        << " symbols, channel input size " << w.input_size();
    throw Error(kModule, msg.str());
  }
  return JointDistribution(p.probs().asDiagonal() * w.matrix());
}

Index encode_multi_index(const std::vector<Index>& digits, const std::vector<Index>& radices) {
  if (digits.size() != radices.size()) throw Error(kModule, "multi-index length mismatch");
  Index code = 0;
  for (std::size_t j = 0; j < digits.size(); ++j) {
    if (digits[j] < 0 || digits[j] >= radices[j]) throw Error(kModule, "multi-index digit out of range");
    code = code * radices[j] + digits[j];
  }
  return code;
}

std::vector<Index> decode_multi_index(Index code, const std::vector<Index>& radices) {
  if (code < 0) throw Error(kModule, "multi-index code out of range");
  std::vector<Index> digits(radices.size());
  for (std::size_t k = radices.size(); k-- > 0;) {
    digits[k] = code % radices[k];
    code /= radices[k];
  }
  if (code != 0) throw Error(kModule, "multi-index code out of range");
  return digits;
}

}  // namespace sdpi
