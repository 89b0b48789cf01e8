#pragma once

#include <Eigen/Dense>

namespace sdpi {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };
const char* to_string(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  int pivots = 0;
};

struct LpOptions {
  double pivot_tolerance = 1e-12;
  /// Phase-one residual above which the problem is declared infeasible.
  double feasibility_tolerance = 1e-9;
  int max_pivots = 100000;
};

/// min c^T x subject to A x = b, x >= 0, by a dense two-phase tableau simplex
/// with Bland's rule (deterministic, no cycling). Rows with b < 0 are negated
/// first; redundant equality rows are detected and dropped after phase one.
LpResult solve_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                  const LpOptions& options = {});

}  // namespace sdpi
