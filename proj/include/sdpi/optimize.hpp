#pragma once

#include <functional>

#include <Eigen/Dense>

namespace sdpi {

/// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

/// Softmax with the usual max shift.
Eigen::VectorXd softmax(const Eigen::VectorXd& z);

struct NelderMeadOptions {
  int max_evaluations = 2000;
  double initial_step = 0.5;
  double f_tolerance = 1e-12;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
};

/// Minimizes `f` from `x0` with the standard reflection/expansion/
/// contraction/shrink coefficients (1, 2, 1/2, 1/2).
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, const NelderMeadOptions& options = {});

/// Golden-section search for a maximum of `f` on [lo, hi]. Returns the
/// abscissa; `best_value` receives the largest value seen.
double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double x_tolerance, double* best_value = nullptr);

}  // namespace sdpi
