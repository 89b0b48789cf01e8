#include "sdpi/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "sdpi/contraction.hpp"
#include "sdpi/sampling.hpp"

namespace sdpi {
namespace {

constexpr std::string_view kModule = "ordering";
constexpr double kWitnessThreshold = 1e-9;
constexpr Index kMaxJointEntries = Index(1) << 16;

void check_common_input(const Channel& w, const Channel& w_prime) {
  if (w.input_size() != w_prime.input_size()) {
    std::ostringstream msg;
    msg << "input-size mismatch: " << w.input_size() << " vs " << w_prime.input_size();
    throw Error(kModule, msg.str());
  }
}

// Input distributions for the falsifiers: Dirichlet(1), low-entropy spikes,
// and point masses perturbed toward the interior.
Eigen::VectorXd sample_input(Index n, int trial, Rng& rng) {
  switch (trial % 5) {
    case 0:
    case 1:
      return sample_dirichlet(n, 1.0, rng);
    case 2:
    case 3:
      return sample_dirichlet(n, 0.1, rng);
    default: {
      std::uniform_int_distribution<Index> pick(0, n - 1);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const double eps = std::pow(10.0, -6.0 * unit(rng));
      Eigen::VectorXd p = eps * sample_dirichlet(n, 1.0, rng);
      p[pick(rng)] += 1.0 - eps;
      return p;
    }
  }
}

Eigen::MatrixXd sample_joint(Index rows, Index cols, int trial, Rng& rng) {
  const Eigen::VectorXd flat = sample_input(rows * cols, trial, rng);
  return Eigen::Map<const Eigen::MatrixXd>(flat.data(), rows, cols);
}

double mi(const Eigen::MatrixXd& joint) { return mutual_information_unchecked(joint); }

// Binary-U joint: U = 1 with probability eps and P_{X|U=1} = p, P_{X|U=0} = q.
Eigen::MatrixXd binary_witness(const Eigen::VectorXd& p, const Eigen::VectorXd& q, double eps) {
  Eigen::MatrixXd joint(2, p.size());
  joint.row(0) = (1.0 - eps) * q.transpose();
  joint.row(1) = eps * p.transpose();
  return joint;
}

void record_witness(LessNoisyVerdict& verdict, Eigen::MatrixXd joint, double gap) {
  if (verdict.witness && gap <= verdict.witness_gap) return;
  verdict.outcome = LessNoisyOutcome::NotLessNoisy;
  verdict.witness = std::move(joint);
  verdict.witness_gap = gap;
}

}  // namespace

const char* to_string(LessNoisyOutcome outcome) {
  switch (outcome) {
    case LessNoisyOutcome::NotLessNoisy: return "NOT_LESS_NOISY";
    case LessNoisyOutcome::NoCounterexampleFound: return "NO_COUNTEREXAMPLE_FOUND";
  }
  return "UNKNOWN";
}

double less_noisy_gap(const Eigen::MatrixXd& joint_ux, const Channel& w, const Channel& w_prime) {
  check_common_input(w, w_prime);
  if (joint_ux.cols() != w.input_size()) throw Error(kModule, "joint does not match the channel input");
  return mi(joint_ux * w.matrix()) - mi(joint_ux * w_prime.matrix());
}

LessNoisyVerdict less_noisy_sampled(const Channel& w, const Channel& w_prime, int trials, std::uint64_t seed) {
  check_common_input(w, w_prime);
  const Index n = w.input_size();
  const DivergenceKind kl = DivergenceKind::kl();
  LessNoisyVerdict verdict;
  verdict.trials = trials;
  Rng rng(split_seed(seed, 0));
  for (int t = 0; t < trials; ++t) {
    const Eigen::VectorXd p = sample_input(n, t, rng);
    const Eigen::VectorXd q = sample_input(n, t + 2, rng);
    const double d = divergence_raw(kl, w.matrix().transpose() * p, w.matrix().transpose() * q);
    const double d_prime = divergence_raw(kl, w_prime.matrix().transpose() * p, w_prime.matrix().transpose() * q);
    if (std::isinf(d) && std::isinf(d_prime)) continue;
    const double violation = d - d_prime;
    verdict.max_violation = std::max(verdict.max_violation, violation);
    if (!(violation > kWitnessThreshold)) continue;
    // I(U;Y)/eps -> D(PW || QW) as eps -> 0; try a range of eps.
    for (double eps : {0.5, 0.1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
      Eigen::MatrixXd joint = binary_witness(p, q, eps);
      const double gap = less_noisy_gap(joint, w, w_prime);
      if (gap > kWitnessThreshold) {
        record_witness(verdict, std::move(joint), gap);
        break;
      }
    }
  }
  return verdict;
}

LessNoisyVerdict less_noisy_sampled_mi(const Channel& w, const Channel& w_prime, int trials, std::uint64_t seed) {
  check_common_input(w, w_prime);
  const Index n = w.input_size();
  LessNoisyVerdict verdict;
  verdict.trials = trials;
  Rng rng(split_seed(seed, 1));
  std::uniform_int_distribution<Index> u_size(2, n + 1);
  for (int t = 0; t < trials; ++t) {
    Eigen::MatrixXd joint = sample_joint(u_size(rng), n, t, rng);
    const double gap = less_noisy_gap(joint, w, w_prime);
    verdict.max_violation = std::max(verdict.max_violation, gap);
    if (gap > kWitnessThreshold) record_witness(verdict, std::move(joint), gap);
  }
  return verdict;
}

ErasureDominance erasure_dominance_check(const Channel& w, int trials, std::uint64_t seed) {
  ErasureDominance result;
  const EtaReport report = eta_kl(w);
  result.eta_kl = report.eta_kl;
  result.binary_exact = report.method == EtaMethod::LeCamBinaryExact;
  result.eta_upper = result.binary_exact ? report.eta_kl : std::max(report.eta_kl_upper, report.eta_kl);
  result.erasure_probability = std::clamp(1.0 - result.eta_upper, 0.0, 1.0);
  const Index q = std::max<Index>(w.input_size(), 2);
  if (w.input_size() < 2) {
    // A single input carries no information; every channel is dominated.
    result.verdict.trials = trials;
    return result;
  }
  const Channel erasure = make_ec(static_cast<int>(q), result.erasure_probability);
  result.verdict = less_noisy_sampled(w, erasure, trials, seed);
  if (!result.binary_exact) {
    const Channel lower = make_ec(static_cast<int>(q), std::clamp(1.0 - result.eta_kl, 0.0, 1.0));
    result.lower_bound_verdict = less_noisy_sampled(w, lower, trials, seed);
  }

  // I(U;E) = (1 - delta) I(U;X) on sampled P_UX.
  Rng rng(split_seed(seed, 7));
  std::uniform_int_distribution<Index> u_size(2, q + 1);
  const int identity_trials = std::min(trials, 1000);
  for (int t = 0; t < identity_trials; ++t) {
    const Eigen::MatrixXd joint = sample_joint(u_size(rng), q, t, rng);
    const double lhs = mi(joint * erasure.matrix());
    const double rhs = (1.0 - result.erasure_probability) * mi(joint);
    result.erasure_identity_error = std::max(result.erasure_identity_error, std::abs(lhs - rhs));
  }
  return result;
}

double samorodnitsky_rhs(const std::vector<double>& etas, const Eigen::MatrixXd& joint_ux,
                         const std::vector<Index>& component_sizes, LogBase base) {
  const auto n = static_cast<int>(component_sizes.size());
  if (n < 1 || n > 12) throw Error(kModule, "subset bound needs 1 <= n <= 12");
  if (static_cast<int>(etas.size()) != n) throw Error(kModule, "one eta per component is required");
  Index total = 1;
  for (Index s : component_sizes) {
    if (s < 1) throw Error(kModule, "component size must be positive");
    total *= s;
  }
  if (joint_ux.cols() != total) {
    std::ostringstream msg;
    msg << "joint has " << joint_ux.cols() << " columns, component sizes give " << total;
    throw Error(kModule, msg.str());
  }
  for (double e : etas) {
    if (!(e >= 0.0 && e <= 1.0)) throw Error(kModule, "eta outside [0,1]");
  }

  // Digits of every column, computed once.
  std::vector<std::vector<Index>> digits(total);
  for (Index c = 0; c < total; ++c) digits[c] = decode_multi_index(c, component_sizes);

  double value = 0.0;
  for (std::uint32_t subset = 1; subset < (1u << n); ++subset) {
    double weight = 1.0;
    std::vector<Index> radices;
    for (int i = 0; i < n; ++i) {
      if (subset & (1u << i)) {
        weight *= etas[i];
        radices.push_back(component_sizes[i]);
      } else {
        weight *= 1.0 - etas[i];
      }
    }
    if (weight == 0.0) continue;
    Index cols = 1;
    for (Index r : radices) cols *= r;
    Eigen::MatrixXd marginal = Eigen::MatrixXd::Zero(joint_ux.rows(), cols);
    std::vector<Index> kept;
    for (Index c = 0; c < total; ++c) {
      kept.clear();
      for (int i = 0; i < n; ++i) {
        if (subset & (1u << i)) kept.push_back(digits[c][i]);
      }
      marginal.col(encode_multi_index(kept, radices)) += joint_ux.col(c);
    }
    value += weight * mi(marginal);
  }
  return from_nats(value, base);
}

double samorodnitsky_gap(const std::vector<Channel>& components, const Eigen::MatrixXd& joint_ux) {
  if (components.empty()) throw Error(kModule, "no components");
  Channel product = components.front();
  std::vector<Index> sizes{components.front().input_size()};
  std::vector<double> etas{eta_kl_certified_upper(components.front())};
  for (std::size_t i = 1; i < components.size(); ++i) {
    product = tensor(product, components[i], kMaxJointEntries * 16);
    sizes.push_back(components[i].input_size());
    etas.push_back(eta_kl_certified_upper(components[i]));
  }
  if (joint_ux.size() > kMaxJointEntries) throw Error(kModule, "joint exceeds 2^16 entries");
  if (joint_ux.cols() != product.input_size()) throw Error(kModule, "joint does not match the product input");
  return mi(joint_ux * product.matrix()) - samorodnitsky_rhs(etas, joint_ux, sizes);
}

double samorodnitsky_verify(const std::vector<Channel>& components, int trials, std::uint64_t seed) {
  if (components.empty()) throw Error(kModule, "no components");
  Index inputs = 1;
  for (const Channel& c : components) inputs *= c.input_size();
  Rng rng(split_seed(seed, 0));
  std::uniform_int_distribution<Index> u_size(2, std::min<Index>(inputs + 1, 8));
  double worst = -kInf;
  for (int t = 0; t < trials; ++t) {
    const Index u = u_size(rng);
    if (u * inputs > kMaxJointEntries) throw Error(kModule, "joint exceeds 2^16 entries");
    worst = std::max(worst, samorodnitsky_gap(components, sample_joint(u, inputs, t, rng)));
  }
  return worst;
}

double tensorize_check(const Channel& w1, const Channel& w1p, const Channel& w2, const Channel& w2p, int trials,
                       std::uint64_t seed) {
  check_common_input(w1, w1p);
  check_common_input(w2, w2p);
  for (const auto& [a, b] : {std::pair{&w1, &w1p}, std::pair{&w2, &w2p}}) {
    const LessNoisyVerdict v = less_noisy_sampled(*a, *b, trials, seed);
    if (v.outcome == LessNoisyOutcome::NotLessNoisy) {
      throw Error(kModule, "single-letter dominance fails; tensorization does not apply");
    }
  }
  const Channel pair = tensor(w1, w2);
  const Channel pair_prime = tensor(w1p, w2p);
  const Index inputs = pair.input_size();
  Rng rng(split_seed(seed, 3));
  std::uniform_int_distribution<Index> u_size(2, std::min<Index>(inputs + 1, 8));
  double worst = -kInf;
  for (int t = 0; t < trials; ++t) {
    const Eigen::MatrixXd joint = sample_joint(u_size(rng), inputs, t, rng);
    worst = std::max(worst, mi(joint * pair.matrix()) - mi(joint * pair_prime.matrix()));
  }
  return worst;
}

}  // namespace sdpi
