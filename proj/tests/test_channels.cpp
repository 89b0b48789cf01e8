#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sdpi/channels.hpp"
#include "sdpi/ficurve.hpp"
#include "sdpi/sampling.hpp"

using namespace sdpi;

namespace {

double max_abs(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

Channel random_channel(Index n, Index m, Rng& rng) { return Channel(sample_stochastic_matrix(n, m, 1.0, rng)); }

}  // namespace

TEST_CASE("channel validation") {
  Eigen::MatrixXd bad(2, 2);
  bad << 0.5, 0.6, 0.5, 0.5;
  CHECK_THROWS_AS(Channel{bad}, Error);
  bad << -0.1, 1.1, 0.5, 0.5;
  CHECK_THROWS_AS(Channel{bad}, Error);
  CHECK_THROWS_AS(make_bsc(1.5), Error);
  CHECK_THROWS_AS(make_ec(1, 0.2), Error);
  CHECK_THROWS_AS(make_ec(2, -0.2), Error);
}

TEST_CASE("named constructors") {
  CHECK(make_bsc(0.0).matrix() == Eigen::MatrixXd::Identity(2, 2));
  const Channel b = make_bsc(0.11);
  CHECK(b(0, 0) == 0.89);
  CHECK(b(0, 1) == 0.11);
  CHECK(b(1, 0) == 0.11);
  const Channel e = make_ec(2, 1.0);
  CHECK(e.output_size() == 3);
  CHECK(e(0, 2) == 1.0);
  CHECK(e(1, 2) == 1.0);
}

TEST_CASE("push forward") {
  const Distribution p = Distribution::bernoulli(0.3);
  CHECK(push_forward(Channel::identity(2), p) == p);
  CHECK(push_forward(make_bsc(0.1), Distribution::bernoulli(0)).probs().isApprox(
      Distribution::bernoulli(0.1).probs(), 1e-15));
  const Distribution e = push_forward(make_ec(2, 0.3), Distribution::bernoulli(0.5));
  CHECK(e[0] == doctest::Approx(0.35).epsilon(1e-15));
  CHECK(e[1] == doctest::Approx(0.35).epsilon(1e-15));
  CHECK(e[2] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK_THROWS_AS(push_forward(make_bsc(0.1), Distribution::uniform(3)), Error);
}

TEST_CASE("composition") {
  const Channel w = make_ec(3, 0.2);
  CHECK(max_abs(compose(Channel::identity(4), w).matrix(), w.matrix()) == 0.0);
  const Channel cascade = compose(make_bsc(0.1), make_bsc(0.2));
  CHECK(max_abs(cascade.matrix(), make_bsc(binary_convolution(0.1, 0.2)).matrix()) <= 1e-15);
  const Channel constant = Channel::constant(4, Distribution::uniform(3));
  CHECK(max_abs(compose(constant, w).matrix(), Channel::constant(3, Distribution::uniform(3)).matrix()) <= 1e-15);
  CHECK_THROWS_AS(compose(make_bsc(0.1), w), Error);
}

TEST_CASE("tensor products") {
  const Channel w = make_ec(2, 0.3);
  CHECK(max_abs(tensor(w, Channel::identity(1)).matrix(), w.matrix()) == 0.0);

  const double d = 0.2;
  const Channel b2 = tensor(make_bsc(d), make_bsc(d));
  for (Index x = 0; x < 4; ++x) {
    for (Index y = 0; y < 4; ++y) {
      const int flips = ((x >> 1) != (y >> 1)) + ((x & 1) != (y & 1));
      const double expected = (flips == 0 ? (1 - d) * (1 - d) : flips == 1 ? d * (1 - d) : d * d);
      CHECK(b2(x, y) == doctest::Approx(expected).epsilon(1e-15));
    }
  }
  const Channel e2 = tensor(w, w);
  CHECK((e2.matrix().rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-15);
  CHECK(max_abs(tensor_power(make_bsc(d), 2).matrix(), b2.matrix()) == 0.0);
  CHECK_THROWS_AS(tensor_power(make_bsc(d), 11, 1 << 20), Error);
}

TEST_CASE("joint and its extractors") {
  const JointDistribution diag = joint(Distribution::uniform(3), Channel::identity(3));
  CHECK(diag.matrix() == Eigen::MatrixXd::Identity(3, 3) / 3.0);
  const JointDistribution j = joint(Distribution::bernoulli(0.5), make_bsc(0.11));
  CHECK(j.matrix()(0, 0) == doctest::Approx(0.445).epsilon(1e-15));
  CHECK(j.matrix()(0, 1) == doctest::Approx(0.055).epsilon(1e-15));

  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const Distribution p(sample_dirichlet(3, 1.0, rng));
    const Channel w = random_channel(3, 4, rng);
    const JointDistribution pw = joint(p, w);
    CHECK((pw.row_marginal().probs() - p.probs()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((pw.col_marginal().probs() - push_forward(w, p).probs()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(max_abs(pw.conditional().matrix(), w.matrix()) <= 1e-12);
  }
}

TEST_CASE("algebra is associative on random triples") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Channel a = random_channel(2, 3, rng);
    const Channel b = random_channel(3, 2, rng);
    const Channel c = random_channel(2, 4, rng);
    CHECK(max_abs(compose(c, compose(b, a)).matrix(), compose(compose(c, b), a).matrix()) <= 1e-12);
    CHECK(max_abs(tensor(a, tensor(b, c)).matrix(), tensor(tensor(a, b), c).matrix()) <= 1e-12);
    const Distribution p(sample_dirichlet(2, 1.0, rng));
    CHECK((push_forward(compose(b, a), p).probs() - push_forward(b, push_forward(a, p)).probs())
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
  }
}

TEST_CASE("multi-index round trip") {
  for (int n = 1; n <= 3; ++n) {
    for (Index radix = 1; radix <= 4; ++radix) {
      const std::vector<Index> radices(static_cast<std::size_t>(n), radix);
      Index total = 1;
      for (int j = 0; j < n; ++j) total *= radix;
      for (Index code = 0; code < total; ++code) {
        const std::vector<Index> digits = decode_multi_index(code, radices);
        CHECK(encode_multi_index(digits, radices) == code);
      }
      CHECK_THROWS_AS(decode_multi_index(total, radices), Error);
    }
  }
  // big-endian: x^2 = (1, 0) over binary digits is 2
  CHECK(encode_multi_index({1, 0}, {2, 2}) == 2);
}
