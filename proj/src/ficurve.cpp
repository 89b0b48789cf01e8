#include "sdpi/ficurve.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "sdpi/common.hpp"
#include "sdpi/optimize.hpp"
#include "sdpi/sampling.hpp"

namespace sdpi {
namespace {

constexpr std::string_view kModule = "ficurve";

void check_delta(double delta) {
  if (!(delta > 0.0 && delta <= 0.5)) throw Error(kModule, "delta must lie in (0, 1/2]");
}

// Binom(n, p) probability mass function, computed in log space.
std::vector<double> binomial_pmf(int n, double p) {
  std::vector<double> pmf(n + 1, 0.0);
  if (p <= 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (p >= 1.0) {
    pmf[n] = 1.0;
    return pmf;
  }
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  for (int k = 0; k <= n; ++k) {
    pmf[k] = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * lp +
                      (n - k) * lq);
  }
  return pmf;
}

double binomial_cdf(int n, double p, int k) {
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  const std::vector<double> pmf = binomial_pmf(n, p);
  double total = 0.0;
  for (int j = 0; j <= k; ++j) total += pmf[j];
  return std::min(total, 1.0);
}

double log2_of(int q) { return std::log2(static_cast<double>(q)); }

// Entropy in bits of the first s coordinates of a uniformly drawn codeword.
double projected_entropy(const std::vector<std::vector<int>>& code, int s) {
  std::map<std::vector<int>, int> counts;
  for (const auto& word : code) ++counts[std::vector<int>(word.begin(), word.begin() + s)];
  const double total = static_cast<double>(code.size());
  double h = 0.0;
  for (const auto& [pattern, count] : counts) {
    const double p = count / total;
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace

const char* to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::FLowerBound: return "F_LOWER_BOUND";
    case CurveKind::FUpperBound: return "F_UPPER_BOUND";
    case CurveKind::Exact: return "EXACT";
  }
  return "UNKNOWN";
}

Curve::Curve(std::vector<double> t, std::vector<double> values, CurveKind kind)
    : t_(std::move(t)), values_(std::move(values)), kind_(kind) {
  if (t_.empty()) throw Error(kModule, "curve has no knots");
  if (t_.size() != values_.size()) throw Error(kModule, "curve knot and value counts differ");
  for (std::size_t i = 0; i < t_.size(); ++i) {
    if (!std::isfinite(t_[i]) || !std::isfinite(values_[i])) throw Error(kModule, "curve has a non-finite entry");
    if (t_[i] < 0.0) throw Error(kModule, "curve knot below 0");
    if (values_[i] < -kTolerance) throw Error(kModule, "curve value below 0");
    values_[i] = std::max(values_[i], 0.0);
    if (i > 0 && !(t_[i] > t_[i - 1])) throw Error(kModule, "curve knots are not strictly increasing");
  }
}

double Curve::operator()(double t) const {
  if (t >= t_.back()) return values_.back();
  double t0 = 0.0;
  double v0 = 0.0;
  for (std::size_t i = 0; i < t_.size(); ++i) {
    if (t <= t_[i]) {
      if (t_[i] == t0) return values_[i];
      return v0 + (values_[i] - v0) * (t - t0) / (t_[i] - t0);
    }
    t0 = t_[i];
    v0 = values_[i];
  }
  return values_.back();
}

std::vector<std::string> Curve::violations() const {
  std::vector<std::string> out;
  auto report = [&](const char* what, std::size_t i) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << " at t = " << t_[i];
    out.push_back(msg.str());
  };
  for (std::size_t i = 0; i < t_.size(); ++i) {
    if (values_[i] > t_[i] + kTolerance) report("value exceeds t", i);
    if (i == 0) continue;
    if (t_[i - 1] > 0.0 && values_[i] / t_[i] > values_[i - 1] / t_[i - 1] + kTolerance) {
      report("value/t increases", i);
    }
    if (t_[i] - values_[i] < t_[i - 1] - values_[i - 1] - kTolerance) report("t - value decreases", i);
  }
  return out;
}

void Curve::validate() const {
  const auto v = violations();
  if (!v.empty()) throw Error(kModule, "invalid curve: " + v.front());
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double binary_entropy_inverse(double y) {
  if (!(y >= -1e-15 && y <= 1.0 + 1e-15)) throw Error(kModule, "h^{-1} argument outside [0,1]");
  if (y <= 0.0) return 0.0;
  if (y >= 1.0) return 0.5;
  double lo = 0.0;
  double hi = 0.5;
  for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (binary_entropy(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double binary_convolution(double a, double b) { return a * (1.0 - b) + b * (1.0 - a); }

double psi(double delta, double t) {
  check_delta(delta);
  if (!(t >= 0.0)) throw Error(kModule, "psi needs t >= 0");
  const double inner = binary_entropy_inverse(std::max(1.0 - t, 0.0));
  const double value = t - 1.0 + binary_entropy(binary_convolution(delta, inner));
  return std::clamp(value, 0.0, t);
}

double psi_iterate(double delta, int n, double t) {
  if (n < 0) throw Error(kModule, "psi iterate count must be >= 0");
  double value = t;
  for (int k = 0; k < n; ++k) value = psi(delta, value);
  return value;
}

double bsc_feedback_bound(double delta, int n, double t) {
  if (n < 1) throw Error(kModule, "feedback bound needs n >= 1");
  return t - psi_iterate(delta, n, t);
}

Curve bsc_curve(double delta, const std::vector<double>& t_grid) {
  std::vector<double> values;
  values.reserve(t_grid.size());
  for (double t : t_grid) values.push_back(t - psi(delta, t));
  return Curve(t_grid, std::move(values), CurveKind::Exact);
}

double erasure_fi_direct(int n, double delta, double x) {
  const std::vector<double> pmf = binomial_pmf(n, 1.0 - delta);
  double total = 0.0;
  for (int k = 0; k <= n; ++k) total += pmf[k] * std::min(static_cast<double>(k), x);
  return total;
}

double erasure_fi_closed_form(int n, double delta, double x) {
  const int fx = static_cast<int>(std::floor(x));
  return x + binomial_cdf(n - 1, 1.0 - delta, fx - 1) * (1.0 - delta) * (n - x) -
         x * delta * binomial_cdf(n - 1, 1.0 - delta, fx);
}

double erasure_fi_bound(int n, int q, double delta, double t) {
  if (n < 1) throw Error(kModule, "erasure bound needs n >= 1");
  if (q < 2) throw Error(kModule, "erasure bound needs q >= 2");
  if (!(delta >= 0.0 && delta <= 1.0)) throw Error(kModule, "erasure probability outside [0,1]");
  if (!(t >= 0.0)) throw Error(kModule, "erasure bound needs t >= 0");
  const double unit = log2_of(q);
  const double x = t / unit;
  const double direct = unit * erasure_fi_direct(n, delta, x);
  const double closed = unit * erasure_fi_closed_form(n, delta, x);
  if (std::abs(direct - closed) > 1e-12 * std::max(1.0, direct)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "binomial expectation " << direct << " and CDF form " << closed << " disagree";
    throw Error(kModule, msg.str());
  }
  return direct;
}

double erasure_tightness_witness(int n, int q, double delta, int k) {
  if (n < 1 || q < 2) throw Error(kModule, "witness needs n >= 1 and q >= 2");
  if (!(delta >= 0.0 && delta <= 1.0)) throw Error(kModule, "erasure probability outside [0,1]");
  const bool repetition = k == 1;
  const bool parity = !repetition && k == n - 1 && n >= 2;
  if (!repetition && !parity) throw Error(kModule, "witness supports k = 1 or k = n - 1 only");
  if (parity && q != 2) throw Error(kModule, "parity-check witness needs q = 2");

  // Entropy of s unerased coordinates; the codes are permutation invariant.
  std::vector<double> h(n + 1, 0.0);
  if (n <= 20) {
    std::vector<std::vector<int>> code;
    if (repetition) {
      for (int a = 0; a < q; ++a) code.emplace_back(n, a);
    } else {
      for (std::uint32_t m = 0; m < (1u << (n - 1)); ++m) {
        std::vector<int> word(n);
        for (int j = 0; j < n - 1; ++j) word[j] = (m >> j) & 1;
        word[n - 1] = std::popcount(m) & 1;
        code.push_back(std::move(word));
      }
    }
    for (int s = 1; s <= n; ++s) h[s] = projected_entropy(code, s);
  } else {
    for (int s = 1; s <= n; ++s) h[s] = std::min(s, k) * log2_of(q);
  }
  const std::vector<double> pmf = binomial_pmf(n, 1.0 - delta);
  double total = 0.0;
  for (int s = 0; s <= n; ++s) total += pmf[s] * h[s];
  return total;
}

Curve concavify(const Curve& c) {
  std::vector<double> ts = c.t();
  std::vector<double> vs = c.values();
  if (ts.front() > 0.0) {
    ts.insert(ts.begin(), 0.0);
    vs.insert(vs.begin(), 0.0);
  }
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2];
      const std::size_t b = hull.back();
      const double cross = (ts[b] - ts[a]) * (vs[i] - vs[a]) - (vs[b] - vs[a]) * (ts[i] - ts[a]);
      if (cross < 0.0) break;
      hull.pop_back();
    }
    hull.push_back(i);
  }
  std::vector<double> out(ts.size());
  std::size_t seg = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    while (seg + 1 < hull.size() && ts[hull[seg + 1]] < ts[i]) ++seg;
    if (seg + 1 >= hull.size()) {
      out[i] = vs[hull[seg]];
      continue;
    }
    const std::size_t a = hull[seg];
    const std::size_t b = hull[seg + 1];
    out[i] = vs[a] + (vs[b] - vs[a]) * (ts[i] - ts[a]) / (ts[b] - ts[a]);
    out[i] = std::max(out[i], vs[i]);
  }
  return Curve(std::move(ts), std::move(out), c.kind());
}

Curve curve_compose_bound(const Curve& f_v, const Curve& f_paw_v,
                          const std::function<double(double)>& f_w_c) {
  if (f_v.size() != f_paw_v.size()) throw Error(kModule, "curve grids differ");
  std::vector<double> values(f_v.size());
  for (std::size_t i = 0; i < f_v.size(); ++i) {
    if (std::abs(f_v.t()[i] - f_paw_v.t()[i]) > 1e-12) throw Error(kModule, "curve grids differ");
    const double gap = f_paw_v.values()[i] - f_v.values()[i];
    if (gap < -1e-12) {
      std::ostringstream msg;
      msg << "F_{pa(W),V|X} < F_{V|X} at t = " << f_v.t()[i];
      throw Error(kModule, msg.str());
    }
    values[i] = f_v.values()[i] + f_w_c(std::max(gap, 0.0));
  }
  Curve out(f_v.t(), std::move(values), CurveKind::FUpperBound);
  out.validate();
  return out;
}

Curve curve_compose_bound(const Curve& f_v, const Curve& f_paw_v, const Curve& f_w_c) {
  // Concavity of the outer curve, with the origin prepended.
  double prev_t = 0.0;
  double prev_v = 0.0;
  double prev_slope = kInf;
  for (std::size_t i = 0; i < f_w_c.size(); ++i) {
    const double t = f_w_c.t()[i];
    const double v = f_w_c.values()[i];
    if (t == 0.0) {
      if (v > Curve::kTolerance) throw Error(kModule, "outer curve must vanish at 0");
      continue;
    }
    const double slope = (v - prev_v) / (t - prev_t);
    if (slope > prev_slope + Curve::kTolerance) throw Error(kModule, "outer curve is not concave");
    prev_slope = slope;
    prev_t = t;
    prev_v = v;
  }
  return curve_compose_bound(f_v, f_paw_v, [&](double s) { return f_w_c(s); });
}

namespace {

struct FiPoint {
  double ix;  // nats
  double iy;  // nats
};

// I(U;X) and I(U;Y) of a joint P_UX and their gradients in the joint's entries.
struct FiEvaluator {
  const Eigen::MatrixXd& w;
  Index k;
  Index nx;

  double mi(const Eigen::MatrixXd& joint, Eigen::MatrixXd* grad) const {
    const Eigen::VectorXd pu = joint.rowwise().sum();
    const Eigen::RowVectorXd pc = joint.colwise().sum();
    double value = 0.0;
    if (grad != nullptr) grad->resize(joint.rows(), joint.cols());
    for (Index u = 0; u < joint.rows(); ++u) {
      for (Index c = 0; c < joint.cols(); ++c) {
        const double j = joint(u, c);
        const double denom = pu[u] * pc[c];
        const double l = (j > 0.0 && denom > 0.0) ? std::log(j / denom) : 0.0;
        if (j > 0.0) value += j * l;
        if (grad != nullptr) (*grad)(u, c) = l;
      }
    }
    return std::max(value, 0.0);
  }

  FiPoint point(const Eigen::MatrixXd& joint) const {
    return {mi(joint, nullptr), mi(joint * w, nullptr)};
  }
};

}  // namespace

Curve fi_estimate(const Channel& channel, const std::vector<double>& t_grid, const FiOptions& options) {
  if (t_grid.empty()) throw Error(kModule, "empty t grid");
  const Index nx = channel.input_size();
  const double tmax_bits = std::log2(static_cast<double>(nx));
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw Error(kModule, "t grid is not sorted");
    if (t_grid[i] < 0.0 || t_grid[i] > tmax_bits + 1e-12) throw Error(kModule, "t grid outside [0, log|X|]");
  }
  const Index k = options.u_size > 0 ? options.u_size : nx + 2;
  if (k < 2) throw Error(kModule, "u_size must be >= 2");
  if (options.restarts < 1) throw Error(kModule, "restarts must be >= 1");

  const Eigen::MatrixXd& w = channel.matrix();
  const FiEvaluator eval{w, k, nx};
  std::vector<FiPoint> pool;

  for (double t_bits : t_grid) {
    if (t_bits <= 0.0) continue;
    const double t = to_nats(t_bits, LogBase::Bits);
    const std::uint64_t t_seed = split_seed(options.seed, std::bit_cast<std::uint64_t>(t_bits));
    for (int r = 0; r < options.restarts; ++r) {
      Rng rng(split_seed(t_seed, static_cast<std::uint64_t>(r)));
      // Dirichlet start, shrunk toward independence until I(U;X) <= t.
      const Eigen::VectorXd start = sample_dirichlet(k * nx, 1.0, rng);
      const Eigen::MatrixXd j0 = Eigen::Map<const Eigen::MatrixXd>(start.data(), k, nx);
      const Eigen::MatrixXd product = j0.rowwise().sum() * j0.colwise().sum();
      double theta = 1.0;
      if (eval.mi(j0, nullptr) > t) {
        double lo = 0.0;
        double hi = 1.0;
        for (int iter = 0; iter < 60; ++iter) {
          const double mid = 0.5 * (lo + hi);
          (eval.mi(mid * j0 + (1.0 - mid) * product, nullptr) > t ? hi : lo) = mid;
        }
        theta = lo;
      }
      const Eigen::MatrixXd j1 = theta * j0 + (1.0 - theta) * product;
      Eigen::VectorXd z = Eigen::Map<const Eigen::VectorXd>(j1.data(), j1.size()).array().max(1e-300).log().matrix();

      double lambda = 0.0;
      double rho = 10.0;
      // Objective scaled by 1/t so that small t stays well conditioned.
      auto objective = [&](const Eigen::VectorXd& logits, Eigen::VectorXd* grad) {
        const Eigen::VectorXd flat = softmax(logits);
        const Eigen::MatrixXd joint = Eigen::Map<const Eigen::MatrixXd>(flat.data(), k, nx);
        Eigen::MatrixXd gx, gy;
        const double ix = eval.mi(joint, grad ? &gx : nullptr);
        const Eigen::MatrixXd out = joint * w;
        const double iy = eval.mi(out, grad ? &gy : nullptr);
        const double slack = std::max(0.0, (ix - t) / t + lambda / rho);
        const double value = -iy / t + 0.5 * rho * slack * slack;
        if (grad != nullptr) {
          const Eigen::MatrixXd g = -(gy * w.transpose()) / t + (rho * slack / t) * gx;
          const Eigen::Map<const Eigen::VectorXd> gflat(g.data(), g.size());
          *grad = flat.cwiseProduct(gflat.array().matrix() - Eigen::VectorXd::Constant(g.size(), flat.dot(gflat)));
        }
        return value;
      };

      for (int outer = 0; outer < options.outer_iterations; ++outer) {
        Eigen::VectorXd grad;
        double value = objective(z, &grad);
        double step = 1.0;
        for (int inner = 0; inner < options.inner_iterations; ++inner) {
          const double gnorm2 = grad.squaredNorm();
          if (gnorm2 < 1e-24) break;
          bool accepted = false;
          step = std::min(step * 2.0, 1e6);
          while (step * std::sqrt(gnorm2) > 1e-14) {
            const Eigen::VectorXd candidate = z - step * grad;
            Eigen::VectorXd candidate_grad;
            const double candidate_value = objective(candidate, &candidate_grad);
            if (candidate_value <= value - 1e-4 * step * gnorm2) {
              z = candidate;
              value = candidate_value;
              grad = std::move(candidate_grad);
              accepted = true;
              break;
            }
            step *= 0.5;
          }
          if (!accepted) break;
        }
        const Eigen::VectorXd flat = softmax(z);
        const FiPoint p = eval.point(Eigen::Map<const Eigen::MatrixXd>(flat.data(), k, nx));
        pool.push_back(p);
        lambda = std::max(0.0, lambda + rho * (p.ix - t) / t);
        rho = std::min(rho * 2.0, 1e5);
      }
    }
  }

  // Envelope: a point (a, b) gives b * min(1, t / a) at every t by erasing U.
  std::vector<double> values;
  values.reserve(t_grid.size());
  for (double t_bits : t_grid) {
    const double t = to_nats(t_bits, LogBase::Bits);
    double best = 0.0;
    for (const FiPoint& p : pool) {
      if (p.ix <= 0.0) continue;
      best = std::max(best, std::min(p.iy, p.ix) * std::min(1.0, t / p.ix));
    }
    values.push_back(std::min(from_nats(best, LogBase::Bits), t_bits));
  }
  Curve curve(t_grid, std::move(values), CurveKind::FLowerBound);
  curve.validate();
  return curve;
}

}  // namespace sdpi
