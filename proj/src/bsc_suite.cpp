#include "sdpi/bsc_suite.hpp"

#include <algorithm>
#include <cmath>

#include "sdpi/channels.hpp"
#include "sdpi/contraction.hpp"
#include "sdpi/ficurve.hpp"

namespace sdpi {
namespace {

constexpr std::string_view kModule = "bsc_suite";

double binomial_pmf(int n, int k, double p) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(p) +
                  (n - k) * std::log1p(-p));
}

}  // namespace

double bsc_power_eta_tv(double delta, int n) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(kModule, "delta outside (0,1)");
  if (n < 1) throw Error(kModule, "n must be >= 1");
  double above = 0.0;
  double middle = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double p = binomial_pmf(n, k, delta);
    if (2 * k > n) above += p;
    if (2 * k == n) middle = p;
  }
  return std::abs(1.0 - 2.0 * above - middle);
}

std::vector<BscSuiteRow> bsc_suite(double delta, int n_max) {
  if (!(delta > 0.0 && delta < 0.5)) throw Error(kModule, "delta must lie in (0, 1/2)");
  if (n_max < 1 || n_max > 16) throw Error(kModule, "n_max must lie in [1, 16]");
  std::vector<BscSuiteRow> rows;
  const Channel bsc = make_bsc(delta);
  for (int n = 1; n <= n_max; ++n) {
    BscSuiteRow row;
    row.n = n;
    row.eta_tv_exact = bsc_power_eta_tv(delta, n);
    row.kl_feedback_bound = 1.0 - std::pow(4.0 * delta * (1.0 - delta), n);
    row.tv_product_bound = 1.0 - std::pow(2.0 * delta, n);
    row.f_curve_bound_t1 = bsc_feedback_bound(delta, n, 1.0);
    if (n <= 10) {
      const Channel power = tensor_power(bsc, n);
      row.eta_tv_computed = eta_tv(power);
      if (n <= 3) row.eta_kl_oracle = eta_kl(power).eta_kl;
    }
    row.tv_ordering_holds = row.eta_tv_exact <= row.tv_product_bound + 1e-12;
    if (row.eta_kl_oracle) row.kl_ordering_holds = *row.eta_kl_oracle <= row.kl_feedback_bound + 1e-9;
    rows.push_back(row);
  }
  return rows;
}

BscExponentFit bsc_tv_exponent_fit(double delta, int n_max) {
  BscExponentFit fit;
  const double base = std::log(4.0 * delta * (1.0 - delta));
  for (int n = 2; n <= n_max; ++n) {
    const double gap = 1.0 - bsc_power_eta_tv(delta, n);
    const double exponent = std::log(gap) / base;
    fit.n.push_back(n);
    fit.c.push_back((exponent - n / 2.0) / std::log(static_cast<double>(n)));
  }
  if (!fit.c.empty()) {
    fit.c_min = *std::min_element(fit.c.begin(), fit.c.end());
    fit.c_max = *std::max_element(fit.c.begin(), fit.c.end());
  }
  fit.within_bracket = fit.c_min >= -3.0 && fit.c_max <= 3.0;
  return fit;
}

}  // namespace sdpi
