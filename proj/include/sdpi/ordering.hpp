#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sdpi/channels.hpp"
#include "sdpi/common.hpp"

namespace sdpi {

enum class LessNoisyOutcome { NotLessNoisy, NoCounterexampleFound };
const char* to_string(LessNoisyOutcome outcome);

/// Result of a sampled search for a counterexample to "w_prime is less
/// noisy than w", i.e. I(U;Y) <= I(U;Y') for all P_UX. Information in nats.
struct LessNoisyVerdict {
  LessNoisyOutcome outcome = LessNoisyOutcome::NoCounterexampleFound;
  int trials = 0;
  /// Largest criterion violation seen (negative when none).
  double max_violation = -kInf;
  /// Present for NotLessNoisy: a P_UX (rows U) with I(U;Y) - I(U;Y') = witness_gap > 1e-9.
  std::optional<Eigen::MatrixXd> witness;
  double witness_gap = 0.0;
};

/// Samples pairs (P, Q) and checks D(PW || QW) <= D(PW' || QW'). A violating
/// pair is turned into a binary-U witness and re-verified on mutual information.
LessNoisyVerdict less_noisy_sampled(const Channel& w, const Channel& w_prime, int trials, std::uint64_t seed);

/// Same question asked directly on sampled P_UX with |U| in [2, |X| + 1].
LessNoisyVerdict less_noisy_sampled_mi(const Channel& w, const Channel& w_prime, int trials,
                                       std::uint64_t seed);

/// I(U;Y) - I(U;Y') for a joint P_UX.
double less_noisy_gap(const Eigen::MatrixXd& joint_ux, const Channel& w, const Channel& w_prime);

struct ErasureDominance {
  double eta_kl = 0.0;          // exact for binary input, else a lower bound
  double eta_upper = 0.0;       // certified upper bound on eta_KL
  bool binary_exact = false;
  double erasure_probability = 0.0;  // 1 - eta_upper
  LessNoisyVerdict verdict;          // w against EC(1 - eta_upper)
  /// Non-binary input only: w against EC(1 - eta_kl) with the lower bound.
  std::optional<LessNoisyVerdict> lower_bound_verdict;
  /// max |I(U;E) - (1 - delta) I(U;X)| over the sampled joints.
  double erasure_identity_error = 0.0;
};

ErasureDominance erasure_dominance_check(const Channel& w, int trials, std::uint64_t seed);

/// sum over subsets s of prod_{i in s} eta_i prod_{i not in s} (1 - eta_i) I(U; X_s).
/// joint_ux has one row per u and one column per x^n (big-endian over
/// component_sizes). Result in `base`.
double samorodnitsky_rhs(const std::vector<double>& etas, const Eigen::MatrixXd& joint_ux,
                         const std::vector<Index>& component_sizes, LogBase base = LogBase::Nats);

/// I(U;Y^n) - samorodnitsky_rhs for the memoryless product of the components,
/// with eta_i the certified eta_KL of each component. Nats.
double samorodnitsky_gap(const std::vector<Channel>& components, const Eigen::MatrixXd& joint_ux);

/// Largest samorodnitsky_gap over random joints P_{U X^n}.
double samorodnitsky_verify(const std::vector<Channel>& components, int trials, std::uint64_t seed);

/// Largest I(U;Y1 Y2) - I(U;Y1' Y2') over random P_{U X1 X2}. Throws if either
/// single-letter pair already fails less_noisy_sampled.
double tensorize_check(const Channel& w1, const Channel& w1p, const Channel& w2, const Channel& w2p, int trials,
                       std::uint64_t seed);

}  // namespace sdpi
