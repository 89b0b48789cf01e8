#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sdpi/coupling.hpp"
#include "sdpi/json_io.hpp"
#include "sdpi/probcore.hpp"
#include "sdpi/sampling.hpp"

using namespace sdpi;

namespace {

JointDistribution diag_half() {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = m(1, 1) = 0.5;
  return JointDistribution(m);
}

JointDistribution antidiag_half() {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 1) = m(1, 0) = 0.5;
  return JointDistribution(m);
}

double tv_of(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return 0.5 * (a - b).cwiseAbs().sum(); }

JointDistribution random_joint(Index nx, Index ny, Rng& rng) {
  return JointDistribution(sample_dirichlet(nx * ny, 0.7, rng).reshaped(ny, nx).transpose());
}

}  // namespace

TEST_CASE("the triple example") {
  const Coupling c = doubly_optimal_coupling(diag_half(), antidiag_half());
  CHECK(std::abs(c.cost - 1.0) <= 1e-8);
  CHECK(std::abs(c.prob_pair_differs - 1.0) <= 1e-8);
  CHECK(std::abs(c.prob_x_differs) <= 1e-8);
  CHECK(std::abs(c.prob_y_differs - 1.0) <= 1e-8);
  CHECK(std::abs(triple_coupling_min(diag_half(), antidiag_half()) - 2.0) <= 1e-8);
  const Eigen::MatrixXd t = triple_optimal_coupling(diag_half(), antidiag_half());
  CHECK(coupling_marginals_match(t, diag_half(), antidiag_half(), 1e-9));
}

TEST_CASE("equal laws couple on the diagonal") {
  Rng rng(5);
  const JointDistribution p = random_joint(3, 2, rng);
  const Coupling c = doubly_optimal_coupling(p, p);
  CHECK(c.cost <= 1e-9);
  CHECK(c.prob_pair_differs <= 1e-9);
  CHECK((c.joint - Eigen::MatrixXd(p.matrix().transpose().reshaped().asDiagonal())).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(triple_coupling_min(p, p) <= 1e-9);
}

TEST_CASE("both equalities on random instances") {
  Rng rng(12);
  for (int trial = 0; trial < 150; ++trial) {
    const Index nx = 1 + trial % 4, ny = 1 + (trial / 4) % 4;
    JointDistribution p = random_joint(nx, ny, rng), q = random_joint(nx, ny, rng);
    if (trial % 5 == 0) {
      // independent marginals
      const Eigen::VectorXd px = sample_dirichlet(nx, 1.0, rng), py = sample_dirichlet(ny, 1.0, rng);
      const Eigen::VectorXd qx = sample_dirichlet(nx, 1.0, rng), qy = sample_dirichlet(ny, 1.0, rng);
      p = JointDistribution(px * py.transpose());
      q = JointDistribution(qx * qy.transpose());
    }
    const Coupling c = doubly_optimal_coupling(p, q);
    const double tv_xy = tv_of(p.matrix(), q.matrix());
    const double tv_x = divergence(DivergenceKind::tv(), p.row_marginal(), q.row_marginal());
    const double tv_y = divergence(DivergenceKind::tv(), p.col_marginal(), q.col_marginal());
    CHECK(std::abs(c.prob_pair_differs - tv_xy) <= 1e-8);
    CHECK(std::abs(c.prob_x_differs - tv_x) <= 1e-8);
    CHECK(std::abs(c.cost - tv_xy - tv_x) <= 1e-8);
    CHECK(c.prob_y_differs >= tv_y - 1e-12);
    CHECK(coupling_marginals_match(c.joint, p, q, 1e-9));
    CHECK(c.joint.minCoeff() >= -1e-12);
    CHECK(triple_coupling_min(p, q) >= tv_xy + tv_x + tv_y - 1e-8);
  }
}

TEST_CASE("errors and determinism") {
  Rng rng(3);
  const JointDistribution p = random_joint(2, 3, rng), q = random_joint(3, 2, rng);
  CHECK_THROWS_AS(doubly_optimal_coupling(p, q), Error);
  const JointDistribution big = random_joint(6, 6, rng);
  CHECK_THROWS_AS(doubly_optimal_coupling(big, big), Error);
  const JointDistribution r = random_joint(2, 3, rng);
  CHECK(doubly_optimal_coupling(p, r).joint == doubly_optimal_coupling(p, r).joint);
}

TEST_CASE("coupling JSON round trip") {
  const Coupling c = doubly_optimal_coupling(diag_half(), antidiag_half());
  const Coupling back = coupling_from_json(Json::parse(to_json(c).dump()));
  CHECK((back.joint - c.joint).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(back.cost == c.cost);
  Json bad = to_json(c);
  bad["coupling"][0][0] = 0.9;
  CHECK_THROWS_AS(coupling_from_json(bad), Error);
}
