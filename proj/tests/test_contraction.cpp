#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sdpi/contraction.hpp"
#include "sdpi/sampling.hpp"

using namespace sdpi;

namespace {

Channel random_channel(Index n, Index m, double alpha, Rng& rng) {
  return Channel(sample_stochastic_matrix(n, m, alpha, rng));
}

// Two blocks of inputs talking to disjoint groups of outputs.
Channel block_kernel(Index n1, Index n2, Index m1, Index m2, Rng& rng) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n1 + n2, m1 + m2);
  m.block(0, 0, n1, m1) = sample_stochastic_matrix(n1, m1, 1.0, rng);
  m.block(n1, m1, n2, m2) = sample_stochastic_matrix(n2, m2, 1.0, rng);
  return Channel(m);
}

}  // namespace

TEST_CASE("eta_tv") {
  for (double d : {0.0, 0.1, 0.3, 0.5, 0.8}) CHECK(eta_tv(make_bsc(d)) == doctest::Approx(std::abs(1 - 2 * d)));
  CHECK(eta_tv(Channel::identity(5)) == 1.0);
  CHECK(eta_tv(tensor_power(make_bsc(0.25), 2)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(eta_tv(Channel::constant(3, Distribution::uniform(4))) == 0.0);
}

TEST_CASE("eta_chi2_at") {
  const Distribution half = Distribution::bernoulli(0.5);
  for (double d : {0.05, 0.2, 0.45}) {
    CHECK(eta_chi2_at(make_bsc(d), half) == doctest::Approx((1 - 2 * d) * (1 - 2 * d)).epsilon(1e-12));
  }
  CHECK(eta_chi2_at(Channel::constant(3, Distribution::uniform(2)), Distribution::uniform(3)) <= 1e-15);
  CHECK(eta_chi2_at(make_ec(2, 0.3), half) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK_THROWS_AS(eta_chi2_at(make_bsc(0.1), Distribution::point_mass(2, 1)), Error);
  // zero-probability inputs are dropped
  Eigen::VectorXd p(3);
  p << 0.5, 0.5, 0.0;
  Eigen::MatrixXd m(3, 2);
  m << 0.9, 0.1, 0.1, 0.9, 0.5, 0.5;
  CHECK(eta_chi2_at(Channel(m), Distribution(p)) == doctest::Approx(0.64).epsilon(1e-12));
}

TEST_CASE("eta_kl closed forms") {
  const EtaReport bsc = eta_kl(make_bsc(0.1));
  CHECK(bsc.method == EtaMethod::LeCamBinaryExact);
  CHECK(bsc.kl_certified);
  CHECK(std::abs(bsc.eta_kl - 0.64) <= 1e-9);
  CHECK(bsc.eta_kl == bsc.eta_chi2_sup);
  CHECK(bsc.eta_tv == doctest::Approx(0.8));

  for (double delta : {0.1, 0.5, 0.9}) {
    const EtaReport ec = eta_kl(make_ec(3, delta));
    CHECK(ec.method == EtaMethod::GridLowerBound);
    CHECK(std::abs(ec.eta_kl - (1 - delta)) <= 1e-3);
    CHECK(ec.eta_kl <= ec.eta_tv + 1e-9);
    CHECK(ec.eta_kl_upper == doctest::Approx(1 - delta).epsilon(1e-15));
  }
  CHECK(eta_kl(Channel::identity(1)).eta_kl == 0.0);
}

TEST_CASE("fixed-input bounds") {
  const Distribution half = Distribution::bernoulli(0.5);
  const KlFixedInputBounds b = eta_kl_upper_bounds(make_bsc(0.2), half);
  CHECK(b.lower == doctest::Approx(0.36));
  REQUIRE(b.upper);
  CHECK(*b.upper == doctest::Approx(0.72));
  const KlFixedInputBounds id = eta_kl_upper_bounds(Channel::identity(2), half);
  CHECK(id.lower == doctest::Approx(1.0));
  CHECK(*id.upper == doctest::Approx(1.0));
  const KlFixedInputBounds flat = eta_kl_upper_bounds(Channel::constant(2, half), half);
  CHECK(flat.lower == 0.0);
  CHECK(*flat.upper == 0.0);
  Eigen::VectorXd p(3);
  p << 0.5, 0.5, 0.0;
  CHECK_FALSE(eta_kl_upper_bounds(make_ec(3, 0.2), Distribution(p)).upper.has_value());
}

TEST_CASE("connectivity criterion") {
  const Distribution half = Distribution::bernoulli(0.5);
  CHECK(is_contractive(make_bsc(0.3), half));
  CHECK_FALSE(is_contractive(Channel::identity(2), half));

  Rng rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const Index n1 = 1 + trial % 3, n2 = 1 + (trial / 3) % 3;
    const Channel blocks = block_kernel(n1, n2, 2, 2, rng);
    const Distribution uniform = Distribution::uniform(n1 + n2);
    CHECK_FALSE(is_contractive(blocks, uniform));
    CHECK(std::abs(eta_chi2_at(blocks, uniform) - 1.0) <= 1e-9);
    CHECK(eta_tv(blocks) == doctest::Approx(1.0).epsilon(1e-15));

    const Channel mixed = random_channel(n1 + n2, 3, 1.0, rng);
    CHECK(is_contractive(mixed, uniform));
    CHECK(eta_chi2_at(mixed, uniform) < 1.0 - 1e-9);
  }

  // planted disconnection of two binary inputs: eta_TV = 1 iff eta_KL = 1
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 4);
    m.block(0, 0, 1, 2) = sample_stochastic_matrix(1, 2, 1.0, rng);
    m.block(1, 2, 1, 2) = sample_stochastic_matrix(1, 2, 1.0, rng);
    const Channel split(m);
    CHECK(eta_tv(split) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(eta_kl(split).eta_kl - 1.0) <= 1e-9);
    const Channel joined = random_channel(2, 4, 1.0, rng);
    CHECK(eta_tv(joined) < 1.0);
    CHECK(eta_kl(joined).eta_kl < 1.0);
  }
}

TEST_CASE("ratio oracle on BSC(0.2)") {
  const Channel w = make_bsc(0.2);
  const Distribution half = Distribution::bernoulli(0.5);
  for (const DivergenceKind& kind : {DivergenceKind::kl(), DivergenceKind::chi2()}) {
    const double r = eta_f_ratio_oracle(w, kind, half, 10000, 1);
    CHECK(r >= 0.99 * 0.36);
    CHECK(r <= 0.36 + 1e-9);
  }
  CHECK(eta_f_ratio_oracle(w, DivergenceKind::tv(), half, 2000, 1) <= 0.6 + 1e-9);
  CHECK(eta_f_ratio_oracle(w, DivergenceKind::kl(), half, 500, 9) ==
        eta_f_ratio_oracle(w, DivergenceKind::kl(), half, 500, 9));
}

TEST_CASE("coefficient ordering on random channels") {
  Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 2 + trial % 3, m = 2 + (trial / 3) % 3;
    const Channel w = random_channel(n, m, 1.0, rng);
    const Distribution q(sample_dirichlet(n, 1.0, rng));
    const double tv = eta_tv(w);
    const double kl_oracle = eta_f_ratio_oracle(w, DivergenceKind::kl(), q, 400, trial);
    CHECK(kl_oracle <= tv + 1e-9);
    CHECK(eta_f_ratio_oracle(w, DivergenceKind::chi2(), q, 400, trial) <= tv + 1e-9);
    CHECK(eta_f_ratio_oracle(w, DivergenceKind::tv(), q, 400, trial) <= tv + 1e-9);
    CHECK(eta_chi2_at(w, q) <= kl_oracle * 1.03 + 1e-6);

    const EtaReport r = eta_kl(w);
    CHECK(r.eta_kl == r.eta_chi2_sup);
    CHECK(r.eta_kl <= r.eta_tv + 1e-9);
    CHECK(r.eta_kl + 1e-9 >= eta_chi2_at(w, q));
  }
}

TEST_CASE("binary input: Le Cam sup equals the spectral sup") {
  Rng rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const Channel w = random_channel(2, 2 + trial % 4, 0.8, rng);
    const double exact = eta_kl(w).eta_kl;
    double sampled = 0.0;
    for (int i = 1; i < 2000; ++i) {
      sampled = std::max(sampled, eta_chi2_at(w, Distribution::bernoulli(i / 2000.0)));
    }
    CHECK(std::abs(exact - sampled) <= 1e-4);
  }
}

TEST_CASE("composition does not increase eta_KL beyond the product") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const Channel w1 = random_channel(2, 2, 1.0, rng);
    const Channel w2 = random_channel(2, 3, 1.0, rng);
    const double both = eta_kl(compose(w2, w1)).eta_kl;
    CHECK(both <= eta_kl(w1).eta_kl * eta_kl(w2).eta_kl + 1e-6);
  }
}

TEST_CASE("Hellinger bracket (soft on the printed upper bound)") {
  Rng rng(37);
  int literal_failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Channel w = random_channel(2, 2 + trial % 3, 1.0, rng);
    HellingerSandwich s;
    REQUIRE_NOTHROW(s = hellinger_sandwich_check(w));
    CHECK(s.lower <= s.eta + 1e-9);
    CHECK(s.eta <= s.upper + 1e-9);
    literal_failures += !s.literal_upper_holds;
  }
  MESSAGE("printed upper bound H^2 - H^4/2 failed on " << literal_failures << " of 100 channels");

  const HellingerSandwich bsc = hellinger_sandwich_check(make_bsc(0.2));
  CHECK(bsc.hellinger_sq == doctest::Approx(0.4));
  CHECK(bsc.eta == doctest::Approx(0.36));
  CHECK(bsc.literal_upper == doctest::Approx(0.32));
  CHECK_FALSE(bsc.literal_upper_holds);
  const HellingerSandwich flat = hellinger_sandwich_check(Channel::constant(2, Distribution::uniform(3)));
  CHECK(flat.lower == 0.0);
  CHECK(flat.eta == 0.0);
  CHECK_THROWS_AS(hellinger_sandwich_check(make_ec(3, 0.1)), Error);
}
