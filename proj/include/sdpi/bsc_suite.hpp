#pragma once

#include <optional>
#include <vector>

namespace sdpi {

/// One row of the n-letter BSC comparison. Information values in bits.
struct BscSuiteRow {
  int n = 0;
  double eta_tv_exact = 0.0;              // 1 - 2 P[|Z| > n/2] - P[|Z| = n/2]
  std::optional<double> eta_tv_computed;  // Dobrushin on the tensor power (n <= 10)
  std::optional<double> eta_kl_oracle;    // eta_kl on the tensor power (n <= 3)
  double kl_feedback_bound = 0.0;         // 1 - (4 delta (1 - delta))^n
  double tv_product_bound = 0.0;          // 1 - (2 delta)^n
  double f_curve_bound_t1 = 0.0;          // t - psi^(n)(t) at t = 1 bit
  bool tv_ordering_holds = false;         // eta_tv_exact <= tv_product_bound
  bool kl_ordering_holds = true;          // eta_kl_oracle <= kl_feedback_bound when computed
};

/// d_TV(Binom(n, delta), Binom(n, 1 - delta)) via the binomial tail formula.
double bsc_power_eta_tv(double delta, int n);

std::vector<BscSuiteRow> bsc_suite(double delta, int n_max);

struct BscExponentFit {
  std::vector<int> n;
  /// c_n solving 1 - eta_TV = (4 delta (1 - delta))^(n/2 + c_n log n), n >= 2.
  std::vector<double> c;
  double c_min = 0.0;
  double c_max = 0.0;
  bool within_bracket = false;  // all c_n in [-3, 3]
};

BscExponentFit bsc_tv_exponent_fit(double delta, int n_max);

}  // namespace sdpi
