#include "sdpi/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace sdpi {

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  Eigen::VectorXd out = (v.array() - theta).max(0.0);
  const double total = out.sum();
  if (total > 0.0) out /= total;
  return out;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
  const double shift = z.maxCoeff();
  Eigen::VectorXd e = (z.array() - shift).exp();
  return e / e.sum();
}

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, const NelderMeadOptions& options) {
  const Eigen::Index n = x0.size();
  std::vector<Eigen::VectorXd> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  int evaluations = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evaluations;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  values[0] = eval(x0);
  for (Eigen::Index i = 0; i < n; ++i) {
    simplex[i + 1][i] += options.initial_step;
    values[i + 1] = eval(simplex[i + 1]);
  }

  std::vector<std::size_t> order(n + 1);
  while (evaluations < options.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[n - 1];
    if (std::abs(values[worst] - values[best]) <= options.f_tolerance) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < order.size() - 1; ++k) centroid += simplex[order[k]];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - simplex[worst]);
    const double f_reflected = eval(reflected);
    if (f_reflected < values[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second_worst]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < values[worst];
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
    const double f_contracted = eval(contracted);
    if (f_contracted < std::min(f_reflected, values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }
    for (std::size_t k = 1; k < order.size(); ++k) {
      const std::size_t idx = order[k];
      simplex[idx] = simplex[best] + 0.5 * (simplex[idx] - simplex[best]);
      values[idx] = eval(simplex[idx]);
    }
  }

  const auto best_it = std::min_element(values.begin(), values.end());
  const std::size_t best = static_cast<std::size_t>(best_it - values.begin());
  return {simplex[best], values[best], evaluations};
}

double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double x_tolerance, double* best_value) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = f(c);
  double fd = f(d);
  double best_x = fc >= fd ? c : d;
  double best = std::max(fc, fd);
  for (int iter = 0; iter < 200 && b - a > x_tolerance; ++iter) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
      if (fc > best) {
        best = fc;
        best_x = c;
      }
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
      if (fd > best) {
        best = fd;
        best_x = d;
      }
    }
  }
  for (double x : {lo, hi}) {
    const double v = f(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  if (best_value != nullptr) *best_value = best;
  return best_x;
}

}  // namespace sdpi
