#include "sdpi/coupling.hpp"

#include <algorithm>
#include <sstream>

namespace sdpi {
namespace {

constexpr std::string_view kModule = "coupling";

struct Costs {
  Eigen::VectorXd pair;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

void check_inputs(const JointDistribution& p, const JointDistribution& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) {
    std::ostringstream msg;
    msg << "alphabet mismatch: " << p.rows() << "x" << p.cols() << " vs " << q.rows() << "x" << q.cols();
    throw Error(kModule, msg.str());
  }
  if (p.rows() * p.cols() > kCouplingMaxSupport) {
    throw Error(kModule, "|X||Y| exceeds the supported size of 32");
  }
}

// Indicator costs on the flattened variable pi(i, j), variable index i * n + j.
Costs indicator_costs(Index nx, Index ny) {
  const Index n = nx * ny;
  Costs c{Eigen::VectorXd::Zero(n * n), Eigen::VectorXd::Zero(n * n), Eigen::VectorXd::Zero(n * n)};
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const Index v = i * n + j;
      c.pair[v] = i != j ? 1.0 : 0.0;
      c.x[v] = i / ny != j / ny ? 1.0 : 0.0;
      c.y[v] = i % ny != j % ny ? 1.0 : 0.0;
    }
  }
  return c;
}

Eigen::MatrixXd solve_transport(const JointDistribution& p, const JointDistribution& q, const Eigen::VectorXd& cost,
                                const CouplingOptions& options) {
  const Index ny = p.cols();
  const Index n = p.rows() * ny;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, n * n);
  Eigen::VectorXd b(2 * n);
  for (Index i = 0; i < n; ++i) {
    b[i] = p.matrix()(i / ny, i % ny);
    b[n + i] = q.matrix()(i / ny, i % ny);
    for (Index j = 0; j < n; ++j) {
      a(i, i * n + j) = 1.0;
      a(n + i, j * n + i) = 1.0;
    }
  }
  const LpResult lp = solve_lp(a, b, cost, options.lp);
  if (lp.status != LpStatus::Optimal) {
    throw Error(kModule, std::string("transport LP failed: ") + to_string(lp.status));
  }
  Eigen::MatrixXd joint(n, n);
  for (Index i = 0; i < n; ++i) {
    // simplex round-off can leave -0.0 or -1e-17 on basic variables
    for (Index j = 0; j < n; ++j) joint(i, j) = std::max(0.0, lp.x[i * n + j]) + 0.0;
  }
  if (!coupling_marginals_match(joint, p, q, options.constraint_tolerance)) {
    throw Error(kModule, "transport LP solution violates the marginal constraints");
  }
  return joint;
}

double expected(const Eigen::MatrixXd& joint, const Eigen::VectorXd& cost) {
  const Index n = joint.rows();
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) total += joint(i, j) * cost[i * n + j];
  }
  return total;
}

}  // namespace

bool coupling_marginals_match(const Eigen::MatrixXd& joint, const JointDistribution& p, const JointDistribution& q,
                              double tolerance) {
  const Index ny = p.cols();
  const Index n = p.rows() * ny;
  if (joint.rows() != n || joint.cols() != n) return false;
  if ((joint.array() < -tolerance).any()) return false;
  for (Index i = 0; i < n; ++i) {
    if (std::abs(joint.row(i).sum() - p.matrix()(i / ny, i % ny)) > tolerance) return false;
    if (std::abs(joint.col(i).sum() - q.matrix()(i / ny, i % ny)) > tolerance) return false;
  }
  return true;
}

Coupling doubly_optimal_coupling(const JointDistribution& p, const JointDistribution& q,
                                 const CouplingOptions& options) {
  check_inputs(p, q);
  const Costs costs = indicator_costs(p.rows(), p.cols());
  const Eigen::MatrixXd joint = solve_transport(p, q, costs.pair + costs.x, options);
  Coupling c{joint, p, q};
  c.prob_pair_differs = expected(joint, costs.pair);
  c.prob_x_differs = expected(joint, costs.x);
  c.prob_y_differs = expected(joint, costs.y);
  c.cost = c.prob_pair_differs + c.prob_x_differs;

  const double tv_pair = 0.5 * (p.matrix() - q.matrix()).cwiseAbs().sum();
  const double tv_x = 0.5 * (p.matrix().rowwise().sum() - q.matrix().rowwise().sum()).cwiseAbs().sum();
  if (std::abs(c.prob_pair_differs - tv_pair) > options.optimality_tolerance ||
      std::abs(c.prob_x_differs - tv_x) > options.optimality_tolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "optimal coupling misses a TV equality: pair " << c.prob_pair_differs << " vs " << tv_pair << ", X "
        << c.prob_x_differs << " vs " << tv_x;
    throw Error(kModule, msg.str());
  }
  return c;
}

Eigen::MatrixXd triple_optimal_coupling(const JointDistribution& p, const JointDistribution& q,
                                        const CouplingOptions& options) {
  check_inputs(p, q);
  const Costs costs = indicator_costs(p.rows(), p.cols());
  return solve_transport(p, q, costs.pair + costs.x + costs.y, options);
}

double triple_coupling_min(const JointDistribution& p, const JointDistribution& q, const CouplingOptions& options) {
  const Costs costs = indicator_costs(p.rows(), p.cols());
  return expected(triple_optimal_coupling(p, q, options), costs.pair + costs.x + costs.y);
}

}  // namespace sdpi
