#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sdpi/channels.hpp"

namespace sdpi {

// Everything in this header is in bits.

enum class CurveKind { FLowerBound, FUpperBound, Exact };
const char* to_string(CurveKind kind);

/// Piecewise-linear curve t -> value on increasing knots t >= 0.
class Curve {
 public:
  static constexpr double kTolerance = 1e-9;

  /// Checks shape only (sorted knots, finite non-negative entries).
  Curve(std::vector<double> t, std::vector<double> values, CurveKind kind);

  const std::vector<double>& t() const { return t_; }
  const std::vector<double>& values() const { return values_; }
  CurveKind kind() const { return kind_; }
  std::size_t size() const { return t_.size(); }
  double tmax() const { return t_.back(); }

  /// Linear interpolation; (0,0) is used left of the first knot and the last
  /// value is held right of the last one.
  double operator()(double t) const;

  /// F_I-curve invariants that fail: value <= t, value/t nonincreasing,
  /// t - value nondecreasing. Empty when all hold within kTolerance.
  std::vector<std::string> violations() const;
  /// Throws with the first violation.
  void validate() const;

 private:
  std::vector<double> t_;
  std::vector<double> values_;
  CurveKind kind_;
};

double binary_entropy(double p);
/// Inverse of h on [0, 1/2], by bisection.
double binary_entropy_inverse(double y);
/// a * b = a(1-b) + b(1-a).
double binary_convolution(double a, double b);

/// t - 1 + h(delta * h^{-1}(max(1 - t, 0))) for delta in (0, 1/2].
double psi(double delta, double t);
/// n-fold composition of psi.
double psi_iterate(double delta, int n, double t);
/// t - psi^(n)(t): F_I upper bound for n uses of BSC(delta) with feedback.
double bsc_feedback_bound(double delta, int n, double t);
/// Exact F_I-curve of BSC(delta) on a grid: t - psi(t).
Curve bsc_curve(double delta, const std::vector<double>& t_grid);

/// E[min(B log q, t)], B ~ Binom(n, 1 - delta). Cross-checked against the
/// closed form in binomial CDFs; throws if they differ by more than 1e-12.
double erasure_fi_bound(int n, int q, double delta, double t);
/// The binomial-CDF closed form alone, in units of log q.
double erasure_fi_closed_form(int n, double delta, double x);
/// The direct expectation E[min(B, x)] alone.
double erasure_fi_direct(int n, double delta, double x);

/// I(U; E^n) for U = X^n uniform on a code and X^n sent through EC_q(delta)^n.
/// k = 1 uses the repetition code (any q); k = n - 1 uses the single parity
/// check code (q = 2 only).
double erasure_tightness_witness(int n, int q, double delta, int k);

/// Upper concave envelope over the knots together with (0, 0).
Curve concavify(const Curve& c);

/// F_v + F_w^c(F_paw - F_v) on the common grid of f_v and f_paw_v.
Curve curve_compose_bound(const Curve& f_v, const Curve& f_paw_v, const Curve& f_w_c);
Curve curve_compose_bound(const Curve& f_v, const Curve& f_paw_v,
                          const std::function<double(double)>& f_w_c);

struct FiOptions {
  int u_size = 0;  // 0 means |X| + 2
  int restarts = 30;
  std::uint64_t seed = 0;
  int outer_iterations = 8;
  int inner_iterations = 200;
};

/// Lower bound on the F_I-curve of w at each grid point from an
/// augmented-Lagrangian search over P_UX. Every point found is also used at
/// other t by mixing U with an erasure, which makes the result monotone.
Curve fi_estimate(const Channel& w, const std::vector<double>& t_grid, const FiOptions& options = {});

}  // namespace sdpi
