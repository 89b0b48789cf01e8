#pragma once

#include <string>

#include <Eigen/Dense>

#include "sdpi/common.hpp"

namespace sdpi {

using Index = Eigen::Index;

/// Shannon entropy in nats of a non-negative vector; zero entries contribute 0.
template <typename Derived>
typename Derived::Scalar entropy(const Eigen::MatrixBase<Derived>& p) {
  using Scalar = typename Derived::Scalar;
  Scalar h(0);
  for (Index i = 0; i < p.size(); ++i) {
    const Scalar v = p.derived().coeff(i);
    if (v > Scalar(0)) h -= v * std::log(v);
  }
  return h;
}

/// Probability vector over a finite alphabet.
///
/// Entries must be non-negative and sum to 1 within 1e-12; inputs within
/// that tolerance are renormalized, anything farther off is rejected.
/// Use `normalized` to build a distribution from arbitrary weights.
class Distribution {
 public:
  static constexpr double kSumTolerance = 1e-12;

  explicit Distribution(Eigen::VectorXd probs);

  static Distribution normalized(const Eigen::VectorXd& weights);
  static Distribution uniform(Index n);
  static Distribution point_mass(Index n, Index at);
  /// Bern(p) as the vector (1 - p, p).
  static Distribution bernoulli(double p);

  const Eigen::VectorXd& probs() const { return probs_; }
  Index size() const { return probs_.size(); }
  double operator[](Index i) const { return probs_[i]; }

  Index support_size() const;
  bool is_point_mass() const { return support_size() == 1; }
  double min_mass() const { return probs_.minCoeff(); }

  friend bool operator==(const Distribution& a, const Distribution& b) {
    return a.probs_ == b.probs_;
  }

 private:
  Eigen::VectorXd probs_;
};

/// The five f-divergences the toolkit knows about.
struct DivergenceKind {
  enum class Tag { TV, KL, Chi2, HellingerSq, LeCam };

  Tag tag = Tag::KL;
  double beta = 0.5;  // only meaningful for LeCam, strictly inside (0,1)

  static DivergenceKind tv() { return {Tag::TV}; }
  static DivergenceKind kl() { return {Tag::KL}; }
  static DivergenceKind chi2() { return {Tag::Chi2}; }
  static DivergenceKind hellinger_sq() { return {Tag::HellingerSq}; }
  static DivergenceKind lecam(double beta);

  /// "tv", "kl", "chi2", "hellinger2", "lecam:<beta>".
  static DivergenceKind parse(const std::string& text);
  std::string to_string() const;
};

/// D_f(p || q) with the conventions 0 f(0/0) = 0 and
/// 0 f(a/0) = lim_{x -> 0} x f(a/x). KL and chi^2 return +inf when p is not
/// absolutely continuous w.r.t. q. Hellinger uses H^2 = 2 - 2 sum sqrt(p q).
double divergence(const DivergenceKind& kind, const Distribution& p,
                  const Distribution& q);

/// Same sums without the Distribution wrapper, for hot loops over vectors
/// that are already known to be valid.
double divergence_raw(const DivergenceKind& kind, const Eigen::VectorXd& p,
                      const Eigen::VectorXd& q);

/// D_f(q + d || q) evaluated from the difference d. Avoids the cancellation
/// of forming p - q when p is very close to q; d should sum to 0.
double divergence_from_difference(const DivergenceKind& kind, const Eigen::VectorXd& q,
                                  const Eigen::VectorXd& d);

/// I(A;B) = D(P_AB || P_A P_B) of a joint matrix (rows index A).
double mutual_information(const Eigen::MatrixXd& joint,
                          LogBase base = LogBase::Nats);

/// Mutual information without validation; the caller guarantees a
/// non-negative matrix of unit mass.
double mutual_information_unchecked(const Eigen::MatrixXd& joint);

/// KL(p || q) computed from the chi^2 integral representation
///   D(p||q) = int_0^inf chi^2(p || (t p + q)/(1+t)) dt / (1+t)
/// by composite Gauss-Legendre after mapping [0, inf) onto [0, 1).
/// Requires supp(p) inside supp(q).
double kl_via_chi2_integral(const Distribution& p, const Distribution& q,
                            int quad_points = 64);

/// Coupling of p and q putting min(p, q) on the diagonal. The off-diagonal
/// mass equals d_TV(p, q).
Eigen::MatrixXd maximal_coupling(const Distribution& p, const Distribution& q);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int order, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

}  // namespace sdpi
