// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// if any asserted criterion fails or runs past its time budget.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "sdpi/bsc_suite.hpp"
#include "sdpi/contraction.hpp"
#include "sdpi/coupling.hpp"
#include "sdpi/ficurve.hpp"
#include "sdpi/json_io.hpp"
#include "sdpi/netbound.hpp"
#include "sdpi/ordering.hpp"
#include "sdpi/probcore.hpp"
#include "sdpi/sampling.hpp"

using namespace sdpi;

namespace {

struct Outcome {
  bool pass = true;
  bool asserted = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  std::function<void(Outcome&)> run;
};

Channel random_channel(Index n, Index m, Rng& rng) { return Channel(sample_stochastic_matrix(n, m, 1.0, rng)); }

double worst(double current, double candidate) { return std::max(current, candidate); }

void bsc_closed_forms(Outcome& o) {
  double err = 0.0;
  for (double d : {0.05, 0.1, 0.2, 0.3, 0.45}) {
    const EtaReport r = eta_kl(make_bsc(d));
    err = worst(err, std::abs(r.eta_kl - (1 - 2 * d) * (1 - 2 * d)));
    err = worst(err, std::abs(r.eta_tv - std::abs(1 - 2 * d)));
    o.require(r.method == EtaMethod::LeCamBinaryExact, "binary exact path not taken");
  }
  o.require(err <= 1e-9, "closed form mismatch");
  o.detail << "max abs error " << err;
}

void erasure_closed_form(Outcome& o) {
  double grid_err = 0.0, upper_err = 0.0;
  for (int q : {2, 3, 5}) {
    for (double d : {0.1, 0.5, 0.9}) {
      const EtaReport r = eta_kl(make_ec(q, d));
      grid_err = worst(grid_err, std::abs(r.eta_kl - (1 - d)));
      upper_err = worst(upper_err, std::abs(r.eta_kl_upper - (1 - d)));
      upper_err = worst(upper_err, std::abs(r.eta_tv - (1 - d)));
      o.require(r.eta_kl <= r.eta_kl_upper + 1e-12, "lower bound above upper bound");
    }
  }
  o.require(grid_err <= 1e-3, "grid lower bound off by more than 1e-3");
  o.require(upper_err <= 1e-15, "eta_tv differs from 1 - delta");
  o.detail << "grid error " << grid_err << ", upper bound error " << upper_err;
}

void ordering_suite(Outcome& o) {
  Rng rng(101);
  double tv_excess = -kInf, chi2_excess = -kInf, chi2_ratio = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    std::uniform_int_distribution<Index> size(2, 5);
    const Index n = size(rng), m = size(rng);
    const Channel w = random_channel(n, m, rng);
    const Distribution q(sample_dirichlet(n, 1.0, rng));
    const double tv = eta_tv(w);
    double kl_oracle = 0.0;
    for (const DivergenceKind& kind : {DivergenceKind::kl(), DivergenceKind::chi2(), DivergenceKind::tv()}) {
      const double r = eta_f_ratio_oracle(w, kind, q, 1000, split_seed(101, trial));
      tv_excess = worst(tv_excess, r - tv);
      if (kind.tag == DivergenceKind::Tag::KL) kl_oracle = r;
    }
    const double chi2 = eta_chi2_at(w, q);
    chi2_excess = worst(chi2_excess, chi2 - 1.03 * kl_oracle);
    if (kl_oracle > 0) chi2_ratio = worst(chi2_ratio, chi2 / kl_oracle);
  }
  o.require(tv_excess <= 1e-9, "an oracle exceeded eta_tv");
  o.require(chi2_excess <= 0.0, "eta_chi2_at above the KL oracle plus 3%");
  o.detail << "max(oracle - eta_tv) " << tv_excess << ", max(eta_chi2_at - 1.03 KL oracle) " << chi2_excess
           << ", max eta_chi2_at / KL oracle " << chi2_ratio;
}

// sup over Bern(p) of eta_chi2_at: coarse grid, then golden-section refinement.
double spectral_sup_binary(const Channel& w) {
  const auto f = [&](double p) { return eta_chi2_at(w, Distribution::bernoulli(p)); };
  const int n = 2000;
  int best = 1;
  for (int i = 2; i < n; ++i) {
    if (f(i / double(n)) > f(best / double(n))) best = i;
  }
  double lo = (best - 1) / double(n), hi = (best + 1) / double(n);
  lo = std::max(lo, 1e-12);
  hi = std::min(hi, 1 - 1e-12);
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 80; ++it) {
    const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    if (f(a) < f(b)) lo = a;
    else hi = b;
  }
  return std::max(f(0.5 * (lo + hi)), f(best / double(n)));
}

void kl_equals_chi2(Outcome& o) {
  Rng rng(202);
  double err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Channel w = random_channel(2, 2 + trial % 4, rng);
    const EtaReport r = eta_kl(w);
    o.require(r.method == EtaMethod::LeCamBinaryExact, "binary exact path not taken");
    err = worst(err, std::abs(r.eta_kl - spectral_sup_binary(w)));
  }
  o.require(err <= 1e-4, "exact and sampled sup differ");
  o.detail << "max |exact - sampled sup| " << err;
}

void kl_integral(Outcome& o) {
  Rng rng(303);
  double err = 0.0;
  int checked = 0;
  while (checked < 200) {
    const Index n = 2 + checked % 5;
    const Distribution p(sample_dirichlet(n, 1.0, rng));
    const Distribution q(sample_dirichlet(n, 1.0, rng));
    if ((p.probs().array() / q.probs().array()).maxCoeff() > 100.0) continue;
    err = worst(err, std::abs(kl_via_chi2_integral(p, q) - divergence(DivergenceKind::kl(), p, q)));
    ++checked;
  }
  o.require(err <= 1e-4, "quadrature differs from direct KL");
  o.detail << "max error " << err << " over 200 pairs";
}

std::string run_command(const std::string& cmd, int& status) {
  std::string out;
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) {
    status = -1;
    return out;
  }
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe.get())) out += buf;
  status = pclose(pipe.release());
  return out;
}

void table1_reproduction(Outcome& o) {
  const double e = 0.3;
  const double expected[4][3] = {{e, e, e + e * e * e},
                                 {e * e, e * e, e * e + e * e * e},
                                 {2 * e - e * e, 2 * e, 2 * e},
                                 {2 * e - e * e, 2 * e, 3 * e}};
  const char* columns[3] = {"percolation", "shortcut_free", "all_paths"};
  int status = 0;
  const std::string out = run_command(std::string(SDPI_CLI_PATH) + " table1 --eta 0.3 --format json", status);
  o.require(status == 0, "table1 command failed");
  if (status != 0) return;
  const Json j = Json::parse(out);
  double err = 0.0;
  for (int r = 0; r < 4; ++r) {
    const Json& row = j.at("rows").at(r);
    for (int c = 0; c < 3; ++c) {
      err = worst(err, std::abs(row.at("tabulated").at(columns[c]).get<double>() - expected[r][c]));
    }
  }
  // the percolation column is also recomputed on the networks themselves
  double net_err = 0.0;
  for (int r = 0; r < 4; ++r) {
    net_err = worst(net_err, std::abs(j.at("rows").at(r).at("computed").at("percolation").get<double>() -
                                      expected[r][0]));
  }
  o.require(err <= 1e-12, "tabulated entry mismatch");
  o.require(net_err <= 1e-12, "network percolation mismatch");
  o.detail << "max table error " << err << ", network percolation error " << net_err;
}

NetNode scalar_node(const std::string& id, std::vector<std::string> parents, double eta) {
  NetNode n;
  n.id = id;
  n.parents = std::move(parents);
  n.eta = eta;
  return n;
}

// Random DAG over X, V1..Vk (k + 1 <= 12 nodes).
BayesNet random_dag(Rng& rng, std::vector<std::string>& sinks) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int k = 2 + static_cast<int>(unit(rng) * 10);
  std::vector<std::string> ids{"X"};
  std::vector<NetNode> nodes;
  for (int i = 1; i <= k; ++i) {
    std::vector<std::string> parents;
    const int want = 1 + static_cast<int>(unit(rng) * 3);
    for (int t = 0; t < want; ++t) {
      const std::string& p = ids[std::min(static_cast<std::size_t>(unit(rng) * ids.size()), ids.size() - 1)];
      if (std::find(parents.begin(), parents.end(), p) == parents.end()) parents.push_back(p);
    }
    nodes.push_back(scalar_node("V" + std::to_string(i), parents, unit(rng)));
    ids.push_back("V" + std::to_string(i));
  }
  sinks.clear();
  for (int i = 1; i <= k; ++i) {
    if (unit(rng) < 0.3 || (i == k && sinks.empty())) sinks.push_back("V" + std::to_string(i));
  }
  return BayesNet("X", nodes);
}

void percolation_consistency(Outcome& o) {
  Rng rng(404);
  double rec_err = 0.0, worst_z = 0.0, sf_gap = kInf;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> sinks;
    const BayesNet net = random_dag(rng, sinks);
    const double exact = perc_exact(net, sinks).value;
    rec_err = worst(rec_err, std::abs(es_recursion_bound(net, sinks) - exact));
    const PercResult mc = perc_mc(net, sinks, 1000000, split_seed(404, trial));
    const double diff = std::abs(mc.value - exact);
    if (mc.stderr_ > 0) worst_z = worst(worst_z, diff / mc.stderr_);
    else o.require(diff == 0.0, "degenerate Monte Carlo estimate off");
    sf_gap = std::min(sf_gap, path_sum_bounds(net, sinks).shortcut_free - exact);
  }
  o.require(rec_err == 0.0 || rec_err <= 1e-12, "recursion differs from enumeration");
  o.require(worst_z <= 4.0, "Monte Carlo outside 4 sigma");
  o.require(sf_gap >= -1e-12, "shortcut-free sum below percolation");
  o.detail << "max |recursion - exact| " << rec_err << ", max |z| " << worst_z << ", min(shortcut-free - exact) "
           << sf_gap;
}

void network_soundness(Outcome& o) {
  Rng rng(505);
  NetNode src;
  src.id = "X";
  src.alphabet = 2;
  double excess = -kInf;
  for (int trial = 0; trial < 50; ++trial) {
    NetNode a, b;
    a.id = "A";
    a.parents = {"X"};
    a.kernel = Channel(sample_stochastic_matrix(2, 2, 1.0, rng));
    b.id = "B";
    b.parents = trial % 2 == 0 ? std::vector<std::string>{"X", "A"} : std::vector<std::string>{"A"};
    b.kernel = Channel(sample_stochastic_matrix(b.parents.size() == 2 ? 4 : 2, 2, 1.0, rng));
    const BayesNet net("X", {src, a, b});
    const std::vector<std::string> sinks = trial % 3 == 0 ? std::vector<std::string>{"A", "B"}
                                                           : std::vector<std::string>{"B"};
    const Channel composed = network_channel(net, sinks);
    // brute force: pair-ratio search at a few reference inputs
    double oracle = 0.0;
    for (double p : {0.5, 0.2, 0.8}) {
      oracle = std::max(oracle, eta_f_ratio_oracle(composed, DivergenceKind::kl(), Distribution::bernoulli(p), 500,
                                                   split_seed(505, trial)));
    }
    excess = worst(excess, oracle - perc_exact(net, sinks).value);
    excess = worst(excess, eta_kl(composed).eta_kl - perc_exact(net, sinks).value);
  }
  o.require(excess <= 1e-6, "oracle exceeds percolation bound");
  o.detail << "max(oracle - perc_exact) " << excess;
}

void bsc_power_tv(Outcome& o) {
  double err = 0.0, excess = -kInf;
  for (double d : {0.1, 0.25}) {
    for (int n = 1; n <= 8; ++n) {
      const double computed = eta_tv(tensor_power(make_bsc(d), n));
      err = worst(err, std::abs(computed - bsc_power_eta_tv(d, n)));
      excess = worst(excess, computed - (1 - std::pow(2 * d, n)));
    }
  }
  o.require(err <= 1e-12, "tensor power differs from the binomial formula");
  o.require(excess <= 1e-12, "above the product bound");
  o.detail << "max error " << err << ", max(eta_tv - (1 - (2 delta)^n)) " << excess;
}

void fi_sandwich(Outcome& o) {
  const double d = 0.11;
  std::vector<double> t;
  for (int i = 0; i < 20; ++i) t.push_back(i / 19.0);
  FiOptions opts;
  const Curve est = fi_estimate(make_bsc(d), t, opts);
  double below = 0.0, above = -kInf;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double exact = t[i] - psi(d, t[i]);
    below = worst(below, exact - est.values()[i]);
    above = worst(above, est.values()[i] - exact);
  }
  o.require(below <= 5e-3, "estimate more than 5e-3 below the curve");
  o.require(above <= 1e-6, "estimate above the curve");
  const double slope = bsc_feedback_bound(d, 1, 1e-4) / 1e-4;
  const double rel = std::abs(slope / ((1 - 2 * d) * (1 - 2 * d)) - 1);
  o.require(rel <= 0.01, "slope at 1e-4");
  o.detail << "max shortfall " << below << ", max excess " << above << ", slope rel. error " << rel;
}

void erasure_tightness(Outcome& o) {
  double err = 0.0;
  for (int n = 2; n <= 5; ++n) {
    for (double d : {0.1, 0.3, 0.5, 0.8}) {
      for (int q : {2, 3, 5}) {
        err = worst(err, std::abs(erasure_tightness_witness(n, q, d, 1) - erasure_fi_bound(n, q, d, std::log2(q))));
      }
      err = worst(err, std::abs(erasure_tightness_witness(n, 2, d, n - 1) - erasure_fi_bound(n, 2, d, n - 1.0)));
    }
  }
  double cf = 0.0;
  for (int n = 1; n <= 12; ++n) {
    for (double d : {0.0, 0.05, 0.3, 0.5, 0.9, 1.0}) {
      for (int i = 0; i <= 400; ++i) {
        const double x = (n + 1.0) * i / 400.0;
        cf = worst(cf, std::abs(erasure_fi_direct(n, d, x) - erasure_fi_closed_form(n, d, x)));
      }
    }
  }
  o.require(err <= 1e-9, "witness differs from the bound");
  o.require(cf <= 1e-12, "direct expectation differs from the CDF form");
  o.detail << "max witness gap " << err << ", max closed-form gap " << cf;
}

void doubly_optimal(Outcome& o) {
  Rng rng(606);
  double err = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    std::uniform_int_distribution<Index> size(1, 4);
    const Index nx = size(rng), ny = size(rng);
    const JointDistribution p(sample_dirichlet(nx * ny, 0.8, rng).reshaped(ny, nx).transpose());
    const JointDistribution q(sample_dirichlet(nx * ny, 0.8, rng).reshaped(ny, nx).transpose());
    const Coupling c = doubly_optimal_coupling(p, q);
    const double tv_xy = 0.5 * (p.matrix() - q.matrix()).cwiseAbs().sum();
    const double tv_x = divergence(DivergenceKind::tv(), p.row_marginal(), q.row_marginal());
    err = worst(err, std::abs(c.prob_pair_differs - tv_xy));
    err = worst(err, std::abs(c.prob_x_differs - tv_x));
    err = worst(err, std::abs(c.cost - tv_xy - tv_x));
  }
  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2, 2), anti = Eigen::MatrixXd::Zero(2, 2);
  diag(0, 0) = diag(1, 1) = anti(0, 1) = anti(1, 0) = 0.5;
  const double triple = triple_coupling_min(JointDistribution(diag), JointDistribution(anti));
  o.require(err <= 1e-8, "equality missed");
  o.require(std::abs(triple - 2.0) <= 1e-8, "triple minimum");
  o.detail << "max equality error " << err << ", triple minimum " << triple;
}

void samorodnitsky(Outcome& o) {
  double v = -kInf;
  int joints = 0;
  const double deltas[] = {0.05, 0.2, 0.35};
  for (int n = 1; n <= 3; ++n) {
    std::vector<Channel> comps;
    for (int i = 0; i < n; ++i) comps.push_back(make_bsc(deltas[(i + n) % 3]));
    v = worst(v, samorodnitsky_verify(comps, 1000, split_seed(707, n)));
    joints += 1000;
  }
  o.require(v <= 1e-9, "bound violated");
  o.detail << "max violation " << v << " over " << joints << " joints";
}

void exponent_direction(Outcome& o) {
  o.asserted = false;
  const BscExponentFit fit = bsc_tv_exponent_fit(0.25, 12);
  o.pass = fit.within_bracket;
  o.detail << "c_n in [" << fit.c_min << ", " << fit.c_max << "] for n = 2..12 (reported only)";
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "BSC closed forms", 1, bsc_closed_forms},
      {2, "erasure closed form", 5, erasure_closed_form},
      {3, "coefficient ordering on 500 channels", 120, ordering_suite},
      {4, "eta_KL equals eta_chi2 (binary input)", 60, kl_equals_chi2},
      {5, "KL integral representation", 10, kl_integral},
      {6, "table1 --eta 0.3", 1, table1_reproduction},
      {7, "percolation consistency on 200 DAGs", 300, percolation_consistency},
      {8, "network bound soundness", 300, network_soundness},
      {9, "BSC^n exact TV", 30, bsc_power_tv},
      {10, "F_I sandwich for BSC(0.11)", 180, fi_sandwich},
      {11, "erasure F-bound tightness", 10, erasure_tightness},
      {12, "doubly-optimal coupling", 120, doubly_optimal},
      {13, "subset information bound", 120, samorodnitsky},
      {14, "BSC^n TV exponent direction", kInf, exponent_direction},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_seconds;
    const bool ok = o.pass && in_time;
    const char* tag = !o.asserted ? (o.pass ? "INFO" : "INFO-MISS") : ok ? "PASS" : "FAIL";
    std::printf("[%s] %2d %s: %s (%.2fs%s)\n", tag, c.id, c.title.c_str(), o.detail.str().c_str(), secs,
                in_time ? "" : ", over time budget");
    std::fflush(stdout);
    if (o.asserted && !ok) ++failures;
  }
  std::printf("%d asserted criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
