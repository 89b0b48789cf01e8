// sdpi: command-line front end. Every command writes one artifact to stdout
// (or --out) and exits 0, or prints a diagnostic and exits 2.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdpi/bsc_suite.hpp"
#include "sdpi/contraction.hpp"
#include "sdpi/coupling.hpp"
#include "sdpi/ficurve.hpp"
#include "sdpi/json_io.hpp"
#include "sdpi/netbound.hpp"
#include "sdpi/ordering.hpp"

namespace {

using namespace sdpi;

constexpr int kExitError = 2;

struct Globals {
  double tol = 1e-9;
  std::uint64_t seed = 0;
  std::string format = "text";
  bool nats = false;
  std::string out;

  LogBase base() const { return nats ? LogBase::Nats : LogBase::Bits; }
  // Curves are computed in bits.
  double from_bits(double v) const { return nats ? v * std::numbers::ln2 : v; }
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) throw Error("cli", "empty entry in list '" + text + "'");
    items.push_back(item);
  }
  return items;
}

std::string fmt(double v, int digits = 12) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(g.out);
  if (!file) throw Error("cli", "cannot write '" + g.out + "'");
  file << text;
}

std::string dump(Json j, const Globals& g) {
  j["log_base"] = log_base_name(g.base());
  return j.dump(2) + "\n";
}

Curve rescale(const Curve& c, const Globals& g) {
  if (!g.nats) return c;
  std::vector<double> t = c.t(), v = c.values();
  for (double& x : t) x = g.from_bits(x);
  for (double& x : v) x = g.from_bits(x);
  return Curve(std::move(t), std::move(v), c.kind());
}

std::vector<double> linspace(double lo, double hi, int points) {
  if (points < 2) throw Error("cli", "--grid needs at least 2 points");
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) t[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  return t;
}

std::string curves_out(const std::vector<Curve>& curves, const Json& extra, const Globals& g) {
  if (g.format == "csv") {
    std::string text = std::string("# log_base=") + log_base_name(g.base()) + "\n";
    for (std::size_t i = 0; i < curves.size(); ++i) text += curve_to_csv(curves[i], i == 0);
    return text;
  }
  Json j = extra;
  j["curves"] = Json::array();
  for (const Curve& c : curves) j["curves"].push_back(to_json(c));
  if (g.format == "json") return dump(j, g);
  std::ostringstream s;
  s << "log_base " << log_base_name(g.base()) << "\n";
  for (const Curve& c : curves) {
    s << to_string(c.kind()) << "\n";
    for (std::size_t i = 0; i < c.size(); ++i) s << "  " << fmt(c.t()[i]) << "  " << fmt(c.values()[i]) << "\n";
  }
  if (!extra.empty()) s << extra.dump(2) << "\n";
  return s.str();
}

// eta ------------------------------------------------------------------------

struct EtaArgs {
  std::string spec;
  std::string input;
  std::string kind = "kl";
  int oracle_trials = 0;
  bool json = false;
};

std::string run_eta(const EtaArgs& a, const Globals& g) {
  const Channel w = parse_channel_spec(a.spec);
  EtaOptions opts;
  opts.seed = g.seed;
  const EtaReport report = eta_kl(w, opts);
  Json j = to_json(report);

  std::optional<Distribution> input;
  if (!a.input.empty()) {
    input = parse_distribution_arg(a.input);
    if (input->size() != w.input_size()) throw Error("cli", "--input size does not match the channel input");
    const KlFixedInputBounds b = eta_kl_upper_bounds(w, *input);
    Json at = {{"eta_chi2", input->is_point_mass() ? 0.0 : eta_chi2_at(w, *input)},
               {"eta_kl_lower", b.lower},
               {"contractive", is_contractive(w, *input)}};
    at["eta_kl_upper"] = b.upper ? Json(*b.upper) : Json(nullptr);
    j["at_input"] = at;
  }
  if (a.oracle_trials > 0) {
    const DivergenceKind kind = DivergenceKind::parse(a.kind);
    const Distribution q = input ? *input : Distribution::uniform(w.input_size());
    j["oracle"] = {{"kind", kind.to_string()},
                   {"trials", a.oracle_trials},
                   {"ratio_lower_bound", eta_f_ratio_oracle(w, kind, q, a.oracle_trials, g.seed)}};
  }
  if (a.json || g.format == "json") return dump(j, g);

  std::ostringstream s;
  if (a.kind == "tv") {
    s << "eta_tv " << fmt(report.eta_tv) << " DOBRUSHIN_EXACT\n";
  } else if (a.kind == "kl" || a.kind == "chi2") {
    s << "eta_" << a.kind << " " << fmt(report.eta_kl) << " " << to_string(report.method)
      << (report.kl_certified ? " certified" : " lower_bound") << "\n";
    s << "eta_kl_upper " << fmt(report.eta_kl_upper) << "\n";
    s << "eta_tv " << fmt(report.eta_tv) << "\n";
  } else {
    s << j.dump(2) << "\n";
    return s.str();
  }
  if (j.contains("at_input")) s << "at_input " << j["at_input"].dump() << "\n";
  if (j.contains("oracle")) s << "oracle " << j["oracle"].dump() << "\n";
  return s.str();
}

// netbound / table1 ------------------------------------------------------------

std::string table1_out(double eta, const Globals& g) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw Error("cli", "--eta must lie in [0,1]");
  const std::vector<Table1Row> rows = table1(eta);
  if (g.format == "json") {
    Json j = {{"eta", eta}, {"rows", Json::array()}};
    for (const Table1Row& r : rows) j["rows"].push_back(to_json(r));
    return dump(j, g);
  }
  if (g.format == "csv") {
    std::string text = "name,sinks,source,percolation,shortcut_free,all_paths\n";
    for (const Table1Row& r : rows) {
      if (r.in_table) {
        text += "\"" + r.name + "\",\"" + r.sinks + "\",table," + fmt(r.tabulated[0]) + "," + fmt(r.tabulated[1]) +
                "," + fmt(r.tabulated[2]) + "\n";
      }
      text += "\"" + r.name + "\",\"" + r.sinks + "\",network," + fmt(r.computed[0]) + "," + fmt(r.computed[1]) +
              "," + fmt(r.computed[2]) + "\n";
    }
    return text;
  }
  std::ostringstream s;
  s << "eta " << eta << " (coefficients, no log base)\n";
  for (const Table1Row& r : rows) {
    s << r.name << "  [" << r.graph << ", sinks " << r.sinks << "]\n";
    const char* cols[3] = {"percolation", "shortcut_free", "all_paths"};
    for (int c = 0; c < 3; ++c) {
      s << "  " << cols[c] << " = " << r.formulas[c] << " = " << fmt(r.in_table ? r.tabulated[c] : r.computed[c]);
      if (r.in_table) s << "  (network: " << fmt(r.computed[c]) << ")";
      s << "\n";
    }
  }
  return s.str();
}

struct NetArgs {
  std::string dag;
  std::string sinks;
  std::string method = "exact";
  std::int64_t samples = 1000000;
  bool tv = false;
  std::string shortcut = "vertex";
  bool table1 = false;
  double eta = 0.3;
};

std::string run_netbound(const NetArgs& a, const Globals& g) {
  if (a.table1) return table1_out(a.eta, g);
  if (a.dag.empty()) throw Error("cli", "netbound needs a DAG file (or --table1)");
  if (a.sinks.empty()) throw Error("cli", "netbound needs --sinks");
  const BayesNet net = bayesnet_from_json(load_json_file(a.dag));
  const std::vector<std::string> sinks = split_list(a.sinks);
  const Coefficient kind = a.tv ? Coefficient::TV : Coefficient::KL;
  Json j = {{"sinks", sinks}, {"coefficient", a.tv ? "TV" : "KL"}};
  if (a.method == "exact") {
    j["result"] = to_json(perc_exact(net, sinks, kind));
  } else if (a.method == "recursion") {
    j["result"] = {{"value", es_recursion_bound(net, sinks, kind)}, {"method", "EXACT_RECURSION"}, {"stderr", 0.0}};
  } else if (a.method == "mc") {
    if (a.samples < 1) throw Error("cli", "--samples must be positive");
    j["result"] = to_json(perc_mc(net, sinks, a.samples, g.seed, 8, kind));
  } else if (a.method == "paths") {
    ShortcutRule rule;
    if (a.shortcut == "vertex") rule = ShortcutRule::VertexSet;
    else if (a.shortcut == "edge") rule = ShortcutRule::EdgeSet;
    else throw Error("cli", "--shortcut must be vertex or edge");
    const PathSums p = path_sum_bounds(net, sinks, rule, kind);
    j["result"] = {{"shortcut_free", p.shortcut_free},
                   {"all_paths", p.all_paths},
                   {"path_count", p.path_count},
                   {"shortcut_free_count", p.shortcut_free_count},
                   {"shortcut_rule", a.shortcut}};
  } else {
    throw Error("cli", "--method must be exact, recursion, mc or paths");
  }
  if (g.format == "json") return dump(j, g);
  return j.dump(2) + "\n";
}

// ficurve --------------------------------------------------------------------

struct FiArgs {
  std::vector<std::string> positional;
  int grid = 65;
  int n = 1;
  int usize = 0;
  int restarts = 30;
};

double parse_number(const std::string& text, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw Error("cli", std::string("cannot parse ") + what + " '" + text + "'");
  return v;
}

std::string run_ficurve(const FiArgs& a, const Globals& g) {
  if (a.positional.empty()) throw Error("cli", "ficurve needs a channel spec, 'bsc <delta>' or 'ec <q> <delta>'");
  const std::string& head = a.positional[0];
  if (head == "bsc") {
    if (a.positional.size() != 2) throw Error("cli", "usage: ficurve bsc <delta> [--n N]");
    if (a.n < 1) throw Error("cli", "--n must be >= 1");
    const double delta = parse_number(a.positional[1], "delta");
    const std::vector<double> t = linspace(0.0, 1.0, a.grid);
    std::vector<Curve> curves{rescale(bsc_curve(delta, t), g)};
    std::vector<double> bound;
    for (double x : t) bound.push_back(bsc_feedback_bound(delta, a.n, x));
    curves.push_back(rescale(Curve(t, bound, CurveKind::FUpperBound), g));
    return curves_out(curves, {{"channel", "bsc"}, {"delta", delta}, {"n", a.n}}, g);
  }
  if (head == "ec") {
    if (a.positional.size() != 3) throw Error("cli", "usage: ficurve ec <q> <delta> --n N");
    const int q = static_cast<int>(parse_number(a.positional[1], "q"));
    const double delta = parse_number(a.positional[2], "delta");
    if (a.n < 1) throw Error("cli", "--n must be >= 1");
    const double tmax = a.n * std::log2(static_cast<double>(q));
    std::vector<double> t = linspace(0.0, tmax, a.grid);
    // hull vertices sit at multiples of log q
    for (int k = 1; k < a.n; ++k) t.push_back(k * std::log2(static_cast<double>(q)));
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end(), [](double x, double y) { return std::abs(x - y) < 1e-12; }), t.end());
    std::vector<double> bound;
    for (double x : t) bound.push_back(erasure_fi_bound(a.n, q, delta, x));
    Json witnesses = Json::array();
    const auto add_witness = [&](int k, const char* code) {
      const double tk = k * std::log2(static_cast<double>(q));
      const double value = erasure_tightness_witness(a.n, q, delta, k);
      witnesses.push_back({{"code", code},
                           {"k", k},
                           {"t", g.from_bits(tk)},
                           {"value", g.from_bits(value)},
                           {"bound", g.from_bits(erasure_fi_bound(a.n, q, delta, tk))},
                           {"interpretation", "F_LOWER_BOUND"}});
    };
    add_witness(1, "repetition");
    if (q == 2 && a.n >= 2) add_witness(a.n - 1, "parity");
    std::vector<Curve> curves{rescale(Curve(t, bound, CurveKind::FUpperBound), g)};
    std::string text = curves_out(curves,
                                  {{"channel", "ec"}, {"q", q}, {"delta", delta}, {"n", a.n}, {"witnesses", witnesses}},
                                  g);
    if (g.format == "csv") {
      for (const Json& w : witnesses) {
        text += fmt(w["t"].get<double>(), 17) + "," + fmt(w["value"].get<double>(), 17) + ",F_LOWER_BOUND\n";
      }
    }
    return text;
  }
  if (a.positional.size() != 1) throw Error("cli", "ficurve <channel-spec> takes no further positional arguments");
  const Channel w = parse_channel_spec(head);
  const double tmax = std::log2(static_cast<double>(w.input_size()));
  FiOptions opts;
  opts.u_size = a.usize;
  opts.restarts = a.restarts;
  opts.seed = g.seed;
  const Curve c = fi_estimate(w, linspace(0.0, tmax, a.grid), opts);
  return curves_out({rescale(c, g)}, {{"channel", head}}, g);
}

// coupling -------------------------------------------------------------------

std::string run_coupling(const std::string& p_path, const std::string& q_path, bool triple, const Globals& g) {
  const JointDistribution p = joint_from_json(load_json_file(p_path));
  const JointDistribution q = joint_from_json(load_json_file(q_path));
  if (p.rows() != q.rows() || p.cols() != q.cols()) throw Error("cli", "P and Q must have the same shape");
  CouplingOptions opts;
  opts.constraint_tolerance = g.tol;
  const Coupling c = doubly_optimal_coupling(p, q, opts);
  Json j = to_json(c);
  j["triple_min"] = triple_coupling_min(p, q, opts);
  if (triple) {
    const Eigen::MatrixXd t = triple_optimal_coupling(p, q, opts);
    Json rows = Json::array();
    for (Index r = 0; r < t.rows(); ++r) {
      Json row = Json::array();
      for (Index k = 0; k < t.cols(); ++k) row.push_back(t(r, k));
      rows.push_back(row);
    }
    j["triple_coupling"] = rows;
  }
  if (g.format == "text") {
    std::ostringstream s;
    s << "cost " << fmt(c.cost) << "\nprob_pair_differs " << fmt(c.prob_pair_differs) << "\nprob_x_differs "
      << fmt(c.prob_x_differs) << "\nprob_y_differs " << fmt(c.prob_y_differs) << "\ntriple_min "
      << fmt(j["triple_min"].get<double>()) << "\n";
    return s.str();
  }
  return dump(j, g);
}

// lessnoisy / samorodnitsky --------------------------------------------------

std::string run_lessnoisy(const std::string& w_path, const std::string& wp_path, int trials,
                          const std::string& criterion, const Globals& g) {
  const Channel w = channel_from_json(load_json_file(w_path));
  const Channel wp = channel_from_json(load_json_file(wp_path));
  if (w.input_size() != wp.input_size()) throw Error("cli", "channels must share the input alphabet");
  if (trials < 1) throw Error("cli", "--trials must be positive");
  LessNoisyVerdict v;
  if (criterion == "kl") v = less_noisy_sampled(w, wp, trials, g.seed);
  else if (criterion == "mi") v = less_noisy_sampled_mi(w, wp, trials, g.seed);
  else throw Error("cli", "--criterion must be kl or mi");
  // Gaps are mutual-information differences; convert for display.
  v.max_violation = from_nats(v.max_violation, g.base());
  v.witness_gap = from_nats(v.witness_gap, g.base());
  Json j = to_json(v);
  j["criterion"] = criterion;
  if (g.format == "text") {
    std::ostringstream s;
    s << to_string(v.outcome) << "\ntrials " << v.trials << "\nmax_violation " << fmt(v.max_violation) << " "
      << log_base_name(g.base()) << "\n";
    if (v.witness) s << "witness_gap " << fmt(v.witness_gap) << "\n";
    return s.str();
  }
  return dump(j, g);
}

std::string run_samorodnitsky(const std::vector<std::string>& specs, int n, int trials, const Globals& g) {
  if (specs.empty()) throw Error("cli", "samorodnitsky needs at least one --component");
  if (trials < 1) throw Error("cli", "--trials must be positive");
  std::vector<Channel> components;
  if (specs.size() == 1) {
    if (n < 1) throw Error("cli", "--n must be >= 1");
    components.assign(static_cast<std::size_t>(n), parse_channel_spec(specs[0]));
  } else {
    if (n != 0 && n != static_cast<int>(specs.size())) throw Error("cli", "--n disagrees with the component count");
    for (const std::string& s : specs) components.push_back(parse_channel_spec(s));
  }
  const double worst = samorodnitsky_verify(components, trials, g.seed);
  Json j = {{"components", specs},
            {"n", components.size()},
            {"trials", trials},
            {"max_violation", from_nats(worst, g.base())},
            {"holds", worst <= g.tol}};
  if (g.format == "text") {
    return "max_violation " + fmt(from_nats(worst, g.base())) + " " + log_base_name(g.base()) +
           (worst <= g.tol ? "\nholds\n" : "\nVIOLATED\n");
  }
  return dump(j, g);
}

// bsc-suite ------------------------------------------------------------------

std::string run_bsc_suite(double delta, int n_max, const Globals& g) {
  const std::vector<BscSuiteRow> rows = bsc_suite(delta, n_max);
  const BscExponentFit fit = bsc_tv_exponent_fit(delta, std::min(n_max, 12));
  // f_curve_bound_t1 is an information value in bits; the rest are coefficients.
  Json j = {{"delta", delta}, {"rows", Json::array()}};
  bool all_hold = true;
  for (const BscSuiteRow& r : rows) {
    Json row = to_json(r);
    row["f_curve_bound_t1"] = g.from_bits(r.f_curve_bound_t1);
    j["rows"].push_back(row);
    all_hold = all_hold && r.tv_ordering_holds && r.kl_ordering_holds;
  }
  j["orderings_hold"] = all_hold;
  j["exponent_fit"] = {{"n", fit.n}, {"c", fit.c}, {"c_min", fit.c_min}, {"c_max", fit.c_max},
                       {"within_bracket", fit.within_bracket}};
  if (g.format == "json") return dump(j, g);
  std::ostringstream s;
  if (g.format == "csv") {
    s << "n,eta_tv_exact,eta_tv_computed,eta_kl_oracle,kl_feedback_bound,tv_product_bound,f_curve_bound_t1\n";
  } else {
    s << "delta " << delta << "  (f_curve_bound_t1 in " << log_base_name(g.base()) << ")\n";
  }
  for (const BscSuiteRow& r : rows) {
    const char sep = g.format == "csv" ? ',' : ' ';
    s << r.n << sep << fmt(r.eta_tv_exact) << sep << (r.eta_tv_computed ? fmt(*r.eta_tv_computed) : "-") << sep
      << (r.eta_kl_oracle ? fmt(*r.eta_kl_oracle) : "-") << sep << fmt(r.kl_feedback_bound) << sep
      << fmt(r.tv_product_bound) << sep << fmt(g.from_bits(r.f_curve_bound_t1)) << "\n";
  }
  if (g.format == "text") {
    s << (all_hold ? "orderings hold\n" : "ORDERING FAILED\n");
    s << "exponent c in [" << fmt(fit.c_min) << ", " << fmt(fit.c_max) << "]"
      << (fit.within_bracket ? " within [-3,3]\n" : " outside [-3,3]\n");
  } else {
    s << "# log_base=" << log_base_name(g.base()) << "\n";
  }
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strong data-processing toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--tol", g.tol, "Numerical tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_flag("--nats", g.nats, "Report information in nats instead of bits");
  app.add_option("--out", g.out, "Write the artifact to this path");

  // Global options are also accepted after the subcommand.
  const auto add_globals = [&](CLI::App* sub) {
    sub->add_option("--tol", g.tol)->check(CLI::PositiveNumber);
    sub->add_option("--seed", g.seed);
    sub->add_option("--format", g.format)->check(CLI::IsMember({"json", "csv", "text"}));
    sub->add_flag("--nats", g.nats);
    sub->add_option("--out", g.out);
  };

  EtaArgs eta;
  CLI::App* eta_cmd = app.add_subcommand("eta", "Contraction coefficients of a channel");
  eta_cmd->add_option("spec", eta.spec, "bsc:<d>, ec:<q>:<d>, bsc^<n>:<d> or file:<path>")->required();
  eta_cmd->add_option("--input", eta.input, "Input distribution: comma list or file:<path>");
  eta_cmd->add_option("--kind", eta.kind)->check(CLI::IsMember({"tv", "kl", "chi2", "hellinger2"}));
  eta_cmd->add_option("--oracle-trials", eta.oracle_trials)->check(CLI::NonNegativeNumber);
  eta_cmd->add_flag("--json", eta.json);
  add_globals(eta_cmd);

  NetArgs net;
  CLI::App* net_cmd = app.add_subcommand("netbound", "Network SDPI bounds");
  net_cmd->add_option("dag", net.dag, "DAG JSON file");
  net_cmd->add_option("--sinks", net.sinks, "Comma-separated sink ids");
  net_cmd->add_option("--method", net.method)->check(CLI::IsMember({"exact", "recursion", "mc", "paths"}));
  net_cmd->add_option("--samples", net.samples);
  net_cmd->add_flag("--tv", net.tv, "Use eta_TV coefficients");
  net_cmd->add_option("--shortcut", net.shortcut)->check(CLI::IsMember({"vertex", "edge"}));
  net_cmd->add_flag("--table1", net.table1);
  net_cmd->add_option("--eta", net.eta);
  add_globals(net_cmd);

  double table_eta = 0.3;
  CLI::App* table_cmd = app.add_subcommand("table1", "Network bound comparison table");
  table_cmd->add_option("--eta", table_eta);
  add_globals(table_cmd);

  FiArgs fi;
  CLI::App* fi_cmd = app.add_subcommand("ficurve", "F_I curves and bounds");
  fi_cmd->add_option("args", fi.positional, "<channel-spec> | bsc <delta> | ec <q> <delta>")->required();
  fi_cmd->add_option("--grid", fi.grid);
  fi_cmd->add_option("--n", fi.n);
  fi_cmd->add_option("--usize", fi.usize)->check(CLI::NonNegativeNumber);
  fi_cmd->add_option("--restarts", fi.restarts)->check(CLI::PositiveNumber);
  add_globals(fi_cmd);

  std::string p_path, q_path;
  bool triple = false;
  CLI::App* cp_cmd = app.add_subcommand("coupling", "Doubly-optimal coupling of two joint laws");
  cp_cmd->add_option("p", p_path)->required();
  cp_cmd->add_option("q", q_path)->required();
  cp_cmd->add_flag("--triple", triple);
  add_globals(cp_cmd);

  std::string w_path, wp_path, criterion = "kl";
  int ln_trials = 2000;
  CLI::App* ln_cmd = app.add_subcommand("lessnoisy", "Search for a less-noisy counterexample");
  ln_cmd->add_option("w", w_path)->required();
  ln_cmd->add_option("wprime", wp_path)->required();
  ln_cmd->add_option("--trials", ln_trials);
  ln_cmd->add_option("--criterion", criterion)->check(CLI::IsMember({"kl", "mi"}));
  add_globals(ln_cmd);

  std::vector<std::string> components;
  int sam_n = 0, sam_trials = 1000;
  CLI::App* sam_cmd = app.add_subcommand("samorodnitsky", "Check the subset-sum bound on random joints");
  sam_cmd->add_option("--component", components)->required();
  sam_cmd->add_option("--n", sam_n);
  sam_cmd->add_option("--trials", sam_trials);
  add_globals(sam_cmd);

  double bsc_delta = 0.25;
  int bsc_nmax = 8;
  CLI::App* bsc_cmd = app.add_subcommand("bsc-suite", "n-letter BSC coefficient table");
  bsc_cmd->add_option("--delta", bsc_delta);
  bsc_cmd->add_option("--nmax", bsc_nmax);
  add_globals(bsc_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    std::string text;
    if (*eta_cmd) text = run_eta(eta, g);
    else if (*net_cmd) text = run_netbound(net, g);
    else if (*table_cmd) text = table1_out(table_eta, g);
    else if (*fi_cmd) text = run_ficurve(fi, g);
    else if (*cp_cmd) text = run_coupling(p_path, q_path, triple, g);
    else if (*ln_cmd) text = run_lessnoisy(w_path, wp_path, ln_trials, criterion, g);
    else if (*sam_cmd) text = run_samorodnitsky(components, sam_n, sam_trials, g);
    else if (*bsc_cmd) text = run_bsc_suite(bsc_delta, bsc_nmax, g);
    emit(g, text);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
