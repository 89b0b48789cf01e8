#pragma once

#include <Eigen/Dense>

#include "sdpi/channels.hpp"
#include "sdpi/lp.hpp"

namespace sdpi {

/// Coupling of two joint laws P_XY and Q_XY. `joint(i, j)` is the mass of
/// ((x, y), (x', y')) with i = x |Y| + y from P and j = x' |Y| + y' from Q.
struct Coupling {
  Eigen::MatrixXd joint;
  JointDistribution left_marginal;
  JointDistribution right_marginal;
  double cost = 0.0;
  double prob_pair_differs = 0.0;  // pi[(X,Y) != (X',Y')]
  double prob_x_differs = 0.0;     // pi[X != X']
  double prob_y_differs = 0.0;     // pi[Y != Y']
};

struct CouplingOptions {
  double constraint_tolerance = 1e-9;
  double optimality_tolerance = 1e-8;
  LpOptions lp;
};

/// Largest |X||Y| accepted (the LP has (|X||Y|)^2 variables).
inline constexpr Index kCouplingMaxSupport = 32;

/// Minimizes E[1{(X,Y) != (X',Y')} + 1{X != X'}] over couplings. The optimum
/// attains d_TV(P_XY, Q_XY) and d_TV(P_X, Q_X) at the same time; both
/// equalities are checked and a failure throws.
Coupling doubly_optimal_coupling(const JointDistribution& p, const JointDistribution& q,
                                 const CouplingOptions& options = {});

/// min over couplings of pi[(X,Y) != (X',Y')] + pi[X != X'] + pi[Y != Y'].
double triple_coupling_min(const JointDistribution& p, const JointDistribution& q,
                           const CouplingOptions& options = {});
/// A coupling attaining triple_coupling_min.
Eigen::MatrixXd triple_optimal_coupling(const JointDistribution& p, const JointDistribution& q,
                                        const CouplingOptions& options = {});

/// Marginals of a coupling matrix, checked against the inputs within `tolerance`.
bool coupling_marginals_match(const Eigen::MatrixXd& joint, const JointDistribution& p,
                              const JointDistribution& q, double tolerance);

}  // namespace sdpi
