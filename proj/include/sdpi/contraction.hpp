#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "sdpi/channels.hpp"
#include "sdpi/probcore.hpp"

namespace sdpi {

enum class EtaMethod { DobrushinExact, SpectralSup, LeCamBinaryExact, GridLowerBound };

const char* to_string(EtaMethod method);

/// Contraction coefficients of one channel.
///
/// `eta_kl` and `eta_chi2_sup` always hold the same number: both come from
/// one supremum of the input-dependent chi^2 coefficient. On the binary-input
/// path that supremum is exact; otherwise it is the best value found and is a
/// lower bound, with `eta_kl_upper` the certified upper bound.
struct EtaReport {
  double eta_tv = 0.0;
  double eta_chi2_sup = 0.0;
  double eta_kl = 0.0;
  double eta_kl_upper = 1.0;
  EtaMethod method = EtaMethod::GridLowerBound;
  bool tv_certified = true;
  bool kl_certified = false;
  /// Input distribution attaining `eta_kl` (Bern(beta) on the binary path).
  Eigen::VectorXd argmax_input;
  /// Binary path: whether the Le Cam profile looked unimodal on the coarse grid.
  bool lecam_unimodal = true;
};

struct EtaOptions {
  int grid_mesh = 32;
  Index max_grid_points = 200000;
  int starts = 20;
  double gradient_tolerance = 1e-10;
  int max_ascent_iterations = 2000;
  std::uint64_t seed = 0;
  /// Budget on SVD work (sum of rows * cols * min(rows, cols)) for the grid.
  double grid_work_budget = 2e9;
};

/// Dobrushin coefficient: max over input pairs of d_TV between rows.
double eta_tv(const Channel& w);

/// Squared maximal correlation of p x w, i.e. the input-dependent chi^2
/// coefficient. Zero-probability inputs and outputs are dropped first.
double eta_chi2_at(const Channel& w, const Distribution& p);

/// eta_chi2_at together with its gradient in p (zero outside supp(p)).
/// The gradient is only meaningful when the second singular value is simple.
double eta_chi2_at_with_gradient(const Channel& w, const Eigen::VectorXd& p,
                                 Eigen::VectorXd& gradient);

/// sup over beta in (0,1) of LC_beta(p || q).
double lecam_sup(const Distribution& p, const Distribution& q, double* argmax_beta = nullptr,
                 bool* unimodal = nullptr);

EtaReport eta_kl(const Channel& w, const EtaOptions& options = {});

/// The certified-upper-bound choice used when building bounds from a kernel:
/// exact eta_KL for binary input, else eta_TV.
double eta_kl_certified_upper(const Channel& w);

struct KlFixedInputBounds {
  double lower = 0.0;
  std::optional<double> upper;  // missing when q has a zero entry
};

/// eta_chi2(w, q) <= eta_KL(w, q) <= eta_chi2(w, q) / min_x q(x), capped at 1.
KlFixedInputBounds eta_kl_upper_bounds(const Channel& w, const Distribution& q);

/// True iff the bipartite support graph {(x,y): p(x) > 0, w(x,y) > 0} is connected.
bool is_contractive(const Channel& w, const Distribution& p);

/// Brute-force lower bound on eta_f(w, q): best sampled ratio
/// D_f(W P || W q) / D_f(P || q), refined by Nelder-Mead.
double eta_f_ratio_oracle(const Channel& w, const DivergenceKind& kind, const Distribution& q,
                          int trials, std::uint64_t seed);

struct HellingerSandwich {
  double lower = 0.0;          // H^2 / 2
  double eta = 0.0;            // eta_KL of the binary-input channel
  double upper = 0.0;          // 1 - (1 - H^2/2)^2 = H^2 - H^4/4
  double hellinger_sq = 0.0;   // H^2 = 2 - 2 sum sqrt(P Q)
  double literal_upper = 0.0;  // H^2 - H^4/2
  bool literal_upper_holds = false;
  double normalized_upper = 0.0;  // h^2 - h^4/2 with h^2 = H^2/2
  bool normalized_upper_holds = false;
};

/// Hellinger bracket on eta_KL for a binary-input channel. Throws when
/// lower <= eta <= upper fails by more than 1e-9; the two alternative
/// readings of the upper bound are only reported.
HellingerSandwich hellinger_sandwich_check(const Channel& w);

}  // namespace sdpi
