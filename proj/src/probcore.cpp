#include "sdpi/probcore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace sdpi {
namespace {

constexpr std::string_view kModule = "probcore";

void require_same_size(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) {
    std::ostringstream msg;
    msg << "alphabet mismatch (" << p.size() << " vs " << q.size() << ")";
    throw Error(kModule, msg.str());
  }
}

}  // namespace

Distribution::Distribution(Eigen::VectorXd probs) : probs_(std::move(probs)) {
  if (probs_.size() < 1) throw Error(kModule, "empty distribution");
  for (Index i = 0; i < probs_.size(); ++i) {
    if (!std::isfinite(probs_[i]) || probs_[i] < 0.0) {
      std::ostringstream msg;
      msg << "entry " << i << " is negative or not finite (" << probs_[i] << ")";
      throw Error(kModule, msg.str());
    }
  }
  const double total = probs_.sum();
  if (std::abs(total - 1.0) > kSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "entries sum to " << total << ", not 1 within " << kSumTolerance;
    throw Error(kModule, msg.str());
  }
  probs_ /= total;
}

Distribution Distribution::normalized(const Eigen::VectorXd& weights) {
  if (weights.size() < 1) throw Error(kModule, "empty weight vector");
  if ((weights.array() < 0.0).any() || !weights.allFinite()) {
    throw Error(kModule, "weights must be finite and non-negative");
  }
  const double total = weights.sum();
  if (!(total > 0.0)) throw Error(kModule, "weights have zero total mass");
  Eigen::VectorXd probs = weights / total;
  // One more division brings the sum within rounding of 1 for any input.
  probs /= probs.sum();
  return Distribution(std::move(probs));
}

Distribution Distribution::uniform(Index n) {
  if (n < 1) throw Error(kModule, "alphabet size must be positive");
  return Distribution(Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::point_mass(Index n, Index at) {
  if (n < 1 || at < 0 || at >= n) throw Error(kModule, "point mass index out of range");
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(n);
  probs[at] = 1.0;
  return Distribution(std::move(probs));
}

Distribution Distribution::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(kModule, "Bernoulli parameter outside [0,1]");
  Eigen::VectorXd probs(2);
  probs << 1.0 - p, p;
  return Distribution(std::move(probs));
}

Index Distribution::support_size() const {
  return static_cast<Index>((probs_.array() > 0.0).count());
}

DivergenceKind DivergenceKind::lecam(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw Error(kModule, "Le Cam parameter beta must lie strictly inside (0,1)");
  }
  DivergenceKind kind{Tag::LeCam};
  kind.beta = beta;
  return kind;
}

DivergenceKind DivergenceKind::parse(const std::string& text) {
  if (text == "tv") return tv();
  if (text == "kl") return kl();
  if (text == "chi2") return chi2();
  if (text == "hellinger2") return hellinger_sq();
  if (text.rfind("lecam:", 0) == 0) {
    const std::string tail = text.substr(6);
    std::size_t used = 0;
    double beta = 0.0;
    try {
      beta = std::stod(tail, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tail.size()) {
      throw Error(kModule, "malformed Le Cam parameter in '" + text + "'");
    }
    return lecam(beta);
  }
  throw Error(kModule, "unknown divergence kind '" + text + "'");
}

std::string DivergenceKind::to_string() const {
  switch (tag) {
    case Tag::TV: return "tv";
    case Tag::KL: return "kl";
    case Tag::Chi2: return "chi2";
    case Tag::HellingerSq: return "hellinger2";
    case Tag::LeCam: {
      std::ostringstream out;
      out.precision(17);
      out << "lecam:" << beta;
      return out.str();
    }
  }
  return "unknown";
}

double divergence_raw(const DivergenceKind& kind, const Eigen::VectorXd& p,
                      const Eigen::VectorXd& q) {
  require_same_size(p, q);
  const Index n = p.size();
  double acc = 0.0;
  switch (kind.tag) {
    case DivergenceKind::Tag::TV:
      return 0.5 * (p - q).cwiseAbs().sum();
    case DivergenceKind::Tag::KL:
      for (Index i = 0; i < n; ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) return kInf;
        acc += p[i] * std::log(p[i] / q[i]);
      }
      return std::max(acc, 0.0);
    case DivergenceKind::Tag::Chi2:
      for (Index i = 0; i < n; ++i) {
        if (q[i] <= 0.0) {
          if (p[i] > 0.0) return kInf;
          continue;
        }
        const double d = p[i] - q[i];
        acc += d * d / q[i];
      }
      return acc;
    case DivergenceKind::Tag::HellingerSq:
      for (Index i = 0; i < n; ++i) acc += std::sqrt(p[i] * q[i]);
      return std::max(0.0, 2.0 - 2.0 * acc);
    case DivergenceKind::Tag::LeCam: {
      const double beta = kind.beta;
      if (!(beta > 0.0 && beta < 1.0)) {
        throw Error(kModule, "Le Cam parameter beta must lie strictly inside (0,1)");
      }
      for (Index i = 0; i < n; ++i) {
        const double den = beta * p[i] + (1.0 - beta) * q[i];
        if (den <= 0.0) continue;
        const double d = p[i] - q[i];
        acc += d * d / den;
      }
      return beta * (1.0 - beta) * acc;
    }
  }
  return 0.0;
}

namespace {

// (1 + u) log(1 + u) - u, accurate for small |u|.
double kl_term(double u) {
  if (u <= -1.0) return 1.0;
  if (std::abs(u) < 1e-3) {
    // sum_{k >= 2} (-1)^k u^k / (k (k - 1))
    return u * u * (0.5 + u * (-1.0 / 6.0 + u * (1.0 / 12.0 + u * (-1.0 / 20.0 + u / 30.0))));
  }
  return (1.0 + u) * std::log1p(u) - u;
}

}  // namespace

double divergence_from_difference(const DivergenceKind& kind, const Eigen::VectorXd& q,
                                  const Eigen::VectorXd& d) {
  require_same_size(q, d);
  const Index n = q.size();
  double acc = 0.0;
  switch (kind.tag) {
    case DivergenceKind::Tag::TV:
      return 0.5 * d.cwiseAbs().sum();
    case DivergenceKind::Tag::KL:
      // sum_i q_i phi(p_i / q_i) with phi(r) = r log r - r + 1; equal to KL
      // when sum(d) = 0 and free of the first-order term otherwise.
      for (Index i = 0; i < n; ++i) {
        if (q[i] <= 0.0) {
          if (d[i] > 0.0) return kInf;
          continue;
        }
        acc += q[i] * kl_term(d[i] / q[i]);
      }
      return acc;
    case DivergenceKind::Tag::Chi2:
      for (Index i = 0; i < n; ++i) {
        if (q[i] <= 0.0) {
          if (d[i] > 0.0) return kInf;
          continue;
        }
        acc += d[i] * d[i] / q[i];
      }
      return acc;
    case DivergenceKind::Tag::HellingerSq:
      for (Index i = 0; i < n; ++i) {
        const double root = std::sqrt(std::max(q[i] + d[i], 0.0)) + std::sqrt(q[i]);
        if (root > 0.0) acc += d[i] * d[i] / (root * root);
      }
      return acc;
    case DivergenceKind::Tag::LeCam: {
      const double beta = kind.beta;
      if (!(beta > 0.0 && beta < 1.0)) {
        throw Error(kModule, "Le Cam parameter beta must lie strictly inside (0,1)");
      }
      for (Index i = 0; i < n; ++i) {
        const double den = q[i] + beta * d[i];
        if (den > 0.0) acc += d[i] * d[i] / den;
      }
      return beta * (1.0 - beta) * acc;
    }
  }
  return 0.0;
}

double divergence(const DivergenceKind& kind, const Distribution& p,
                  const Distribution& q) {
  return divergence_raw(kind, p.probs(), q.probs());
}

double mutual_information_unchecked(const Eigen::MatrixXd& joint) {
  const Eigen::VectorXd row = joint.rowwise().sum();
  const Eigen::RowVectorXd col = joint.colwise().sum();
  double acc = 0.0;
  for (Index j = 0; j < joint.cols(); ++j) {
    for (Index i = 0; i < joint.rows(); ++i) {
      const double v = joint(i, j);
      if (v > 0.0) acc += v * std::log(v / (row[i] * col[j]));
    }
  }
  return std::max(acc, 0.0);
}

double mutual_information(const Eigen::MatrixXd& joint, LogBase base) {
  if (joint.size() == 0) throw Error(kModule, "empty joint distribution");
  if (!joint.allFinite() || (joint.array() < 0.0).any()) {
    throw Error(kModule, "joint distribution has a negative or non-finite entry");
  }
  const double total = joint.sum();
  if (std::abs(total - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "joint distribution sums to " << total << ", not 1 within 1e-9";
    throw Error(kModule, msg.str());
  }
  return from_nats(mutual_information_unchecked(joint / total), base);
}

void gauss_legendre(int order, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (order < 1) throw Error(kModule, "quadrature order must be positive");
  nodes.resize(order);
  weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      derivative = order * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / derivative;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= order; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    derivative = order * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
    nodes[i] = -x;
    nodes[order - 1 - i] = x;
    weights[i] = w;
    weights[order - 1 - i] = w;
  }
}

double kl_via_chi2_integral(const Distribution& p, const Distribution& q,
                            int quad_points) {
  require_same_size(p.probs(), q.probs());
  if (quad_points < 16) throw Error(kModule, "quad_points must be at least 16");
  for (Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0 && q[i] <= 0.0) {
      throw Error(kModule, "unsupported support configuration: supp(p) is not inside supp(q), KL is infinite");
    }
  }
  if (p == q) return 0.0;

  // With t = s / (1 - s) the integrand chi^2(p || P^t) dt / (1 + t) becomes
  // sum_i (p_i - q_i)^2 (1 - s) / (s p_i + (1 - s) q_i) ds on [0, 1].
  // Without the 1 / (1 + t) weight the integral is D(p||q) + D(q||p).
  constexpr int kPanelOrder = 16;
  const int panels = std::max(1, quad_points / kPanelOrder);
  Eigen::VectorXd nodes, weights;
  gauss_legendre(kPanelOrder, nodes, weights);

  const Eigen::ArrayXd diff2 = (p.probs() - q.probs()).array().square();
  const double width = 1.0 / panels;
  double total = 0.0;
  for (int panel = 0; panel < panels; ++panel) {
    const double left = panel * width;
    for (int k = 0; k < kPanelOrder; ++k) {
      const double s = left + 0.5 * width * (nodes[k] + 1.0);
      double integrand = 0.0;
      for (Index i = 0; i < p.size(); ++i) {
        if (q[i] <= 0.0) continue;
        integrand += diff2[i] * (1.0 - s) / (s * p[i] + (1.0 - s) * q[i]);
      }
      total += 0.5 * width * weights[k] * integrand;
    }
  }
  return total;
}

Eigen::MatrixXd maximal_coupling(const Distribution& p, const Distribution& q) {
  require_same_size(p.probs(), q.probs());
  const Index n = p.size();
  const Eigen::VectorXd common = p.probs().cwiseMin(q.probs());
  const Eigen::VectorXd rest_p = p.probs() - common;
  const Eigen::VectorXd rest_q = q.probs() - common;
  const double tv = rest_p.sum();

  Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(n, n);
  coupling.diagonal() = common;
  // rest_p and rest_q have disjoint supports, so the product is off-diagonal.
  if (tv > 0.0) coupling += rest_p * rest_q.transpose() / tv;
  return coupling;
}

}  // namespace sdpi
