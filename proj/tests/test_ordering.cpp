#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sdpi/contraction.hpp"
#include "sdpi/json_io.hpp"
#include "sdpi/ordering.hpp"
#include "sdpi/probcore.hpp"
#include "sdpi/sampling.hpp"

using namespace sdpi;

TEST_CASE("less noisy: trivial orders") {
  const Channel bsc = make_bsc(0.3);
  const Channel id = Channel::identity(2);
  CHECK(less_noisy_sampled(bsc, bsc, 500, 1).outcome == LessNoisyOutcome::NoCounterexampleFound);
  const LessNoisyVerdict ok = less_noisy_sampled(bsc, id, 2000, 1);
  CHECK(ok.outcome == LessNoisyOutcome::NoCounterexampleFound);
  CHECK(ok.trials == 2000);
  CHECK_FALSE(ok.witness.has_value());

  const LessNoisyVerdict bad = less_noisy_sampled(id, bsc, 2000, 1);
  REQUIRE(bad.outcome == LessNoisyOutcome::NotLessNoisy);
  REQUIRE(bad.witness.has_value());
  CHECK(bad.witness_gap > 1e-9);
  CHECK(std::abs(less_noisy_gap(*bad.witness, id, bsc) - bad.witness_gap) <= 1e-12);

  const LessNoisyVerdict mi = less_noisy_sampled_mi(id, bsc, 500, 2);
  CHECK(mi.outcome == LessNoisyOutcome::NotLessNoisy);
  CHECK_THROWS_AS(less_noisy_sampled(bsc, Channel::identity(3), 10, 1), Error);
}

TEST_CASE("divergence and information criteria agree") {
  Rng rng(8);
  int disagreements = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Channel w(sample_stochastic_matrix(2, 2, 1.0, rng));
    // half the pairs are degraded versions of w, so dominance holds
    const Channel wp = trial % 2 == 0 ? Channel(sample_stochastic_matrix(2, 3, 1.0, rng))
                                      : compose(Channel(sample_stochastic_matrix(2, 2, 2.0, rng)), w);
    const bool kl = less_noisy_sampled(w, wp, 400, trial).outcome == LessNoisyOutcome::NotLessNoisy;
    const bool mi = less_noisy_sampled_mi(w, wp, 400, trial).outcome == LessNoisyOutcome::NotLessNoisy;
    disagreements += kl != mi;
  }
  MESSAGE("criteria disagreed on " << disagreements << " of 100 pairs");
  CHECK(disagreements <= 5);
}

TEST_CASE("erasure dominance") {
  const ErasureDominance bsc = erasure_dominance_check(make_bsc(0.2), 10000, 3);
  CHECK(bsc.binary_exact);
  CHECK(std::abs(bsc.eta_kl - 0.36) <= 1e-9);
  CHECK(std::abs(bsc.erasure_probability - 0.64) <= 1e-9);
  CHECK(bsc.verdict.outcome == LessNoisyOutcome::NoCounterexampleFound);
  CHECK(bsc.erasure_identity_error <= 1e-12);

  const ErasureDominance id = erasure_dominance_check(Channel::identity(2), 500, 3);
  CHECK(id.erasure_probability <= 1e-12);
  CHECK(id.verdict.outcome == LessNoisyOutcome::NoCounterexampleFound);

  const ErasureDominance ec = erasure_dominance_check(make_ec(2, 0.4), 2000, 3);
  CHECK(ec.verdict.outcome == LessNoisyOutcome::NoCounterexampleFound);

  const ErasureDominance ternary = erasure_dominance_check(make_ec(3, 0.3), 1000, 4);
  CHECK_FALSE(ternary.binary_exact);
  CHECK(ternary.verdict.outcome == LessNoisyOutcome::NoCounterexampleFound);
  CHECK(ternary.lower_bound_verdict.has_value());
  CHECK(ternary.eta_kl <= ternary.eta_upper + 1e-9);
}

TEST_CASE("subset information sum") {
  // X1 = X2 = U uniform: every nonempty subset carries one bit
  Eigen::MatrixXd copy = Eigen::MatrixXd::Zero(2, 4);
  copy(0, 0) = copy(1, 3) = 0.5;
  CHECK(samorodnitsky_rhs({0.5, 0.5}, copy, {2, 2}, LogBase::Bits) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(samorodnitsky_rhs({1.0, 1.0}, copy, {2, 2}, LogBase::Bits) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(samorodnitsky_rhs({0.0, 0.0}, copy, {2, 2}) == 0.0);

  Rng rng(19);
  const Eigen::MatrixXd single = sample_dirichlet(6, 1.0, rng).reshaped(3, 2);
  CHECK(samorodnitsky_rhs({0.4}, single, {2}) ==
        doctest::Approx(0.4 * mutual_information(single)).epsilon(1e-12));
  CHECK_THROWS_AS(samorodnitsky_rhs({0.5, 0.5}, single, {2, 2}), Error);
  CHECK_THROWS_AS(samorodnitsky_rhs({1.5}, single, {2}), Error);
}

TEST_CASE("subset information bound holds") {
  for (int n = 1; n <= 3; ++n) {
    const std::vector<Channel> comps(static_cast<std::size_t>(n), make_bsc(0.2));
    CHECK(samorodnitsky_verify(comps, 200, n) <= 1e-9);
  }
  CHECK(samorodnitsky_verify({make_bsc(0.1), make_bsc(0.35)}, 200, 7) <= 1e-9);
  // noiseless components meet the bound with equality
  Rng rng(2);
  const Eigen::MatrixXd j = sample_dirichlet(8, 1.0, rng).reshaped(2, 4);
  const std::vector<Channel> ids(2, Channel::identity(2));
  CHECK(std::abs(samorodnitsky_gap(ids, j)) <= 1e-12);
}

TEST_CASE("tensorization") {
  const Channel bsc = make_bsc(0.3);
  const Channel ec = make_ec(2, 1.0 - eta_kl(bsc).eta_kl);
  CHECK(tensorize_check(bsc, bsc, bsc, bsc, 100, 1) <= 1e-12);
  CHECK(tensorize_check(bsc, ec, bsc, ec, 300, 1) <= 1e-9);
  CHECK(tensorize_check(bsc, Channel::identity(2), bsc, Channel::identity(2), 100, 1) <= 1e-12);
  CHECK_THROWS_AS(tensorize_check(Channel::identity(2), bsc, bsc, bsc, 100, 1), Error);
}

TEST_CASE("verdict JSON round trip") {
  const LessNoisyVerdict bad = less_noisy_sampled(Channel::identity(2), make_bsc(0.3), 500, 1);
  const LessNoisyVerdict back = verdict_from_json(Json::parse(to_json(bad).dump()));
  CHECK(back.outcome == bad.outcome);
  CHECK(back.witness_gap == bad.witness_gap);
  const LessNoisyVerdict ok = less_noisy_sampled(make_bsc(0.3), Channel::identity(2), 100, 1);
  CHECK(verdict_from_json(to_json(ok)).outcome == LessNoisyOutcome::NoCounterexampleFound);
  Json broken = to_json(bad);
  broken.erase("witness_p_ux");
  CHECK_THROWS_AS(verdict_from_json(broken), Error);
}
