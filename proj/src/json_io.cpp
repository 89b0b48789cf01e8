#include "sdpi/json_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sdpi {
namespace {

constexpr std::string_view kModule = "io";

Eigen::MatrixXd matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw Error(kModule, std::string(what) + " must be a non-empty array of rows");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) throw Error(kModule, std::string(what) + " rows must be non-empty arrays");
  Eigen::MatrixXd m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw Error(kModule, std::string(what) + " rows differ in length");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw Error(kModule, std::string(what) + " entries must be numbers");
      m(static_cast<Index>(r), static_cast<Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw Error(kModule, std::string(what) + " must be a non-empty array");
  Eigen::VectorXd v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(kModule, std::string(what) + " entries must be numbers");
    v[static_cast<Index>(i)] = j[i].get<double>();
  }
  return v;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(kModule, std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number()) throw Error(kModule, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

double parse_double(const std::string& text, const std::string& context) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw Error(kModule, "cannot parse number '" + text + "' in " + context);
  }
  return value;
}

int parse_int(const std::string& text, const std::string& context) {
  int value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw Error(kModule, "cannot parse integer '" + text + "' in " + context);
  }
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  std::istringstream in(text);
  while (std::getline(in, current, sep)) parts.push_back(current);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

template <typename E>
E enum_from_string(const std::string& s, std::initializer_list<E> values, const char* what) {
  for (E v : values) {
    if (s == to_string(v)) return v;
  }
  throw Error(kModule, std::string("unknown ") + what + " '" + s + "'");
}

}  // namespace

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(kModule, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(kModule, "malformed JSON in '" + path + "': " + e.what());
  }
}

Channel channel_from_json(const Json& j) {
  if (!j.is_object()) return Channel(matrix_from_json(j, "channel matrix"));
  Channel w(matrix_from_json(field(j, "matrix"), "channel matrix"));
  if (j.contains("input_size") && j.at("input_size") != w.input_size()) {
    throw Error(kModule, "input_size does not match the matrix");
  }
  if (j.contains("output_size") && j.at("output_size") != w.output_size()) {
    throw Error(kModule, "output_size does not match the matrix");
  }
  return w;
}

Json to_json(const Channel& w) {
  return {{"input_size", w.input_size()}, {"output_size", w.output_size()}, {"matrix", matrix_to_json(w.matrix())}};
}

JointDistribution joint_from_json(const Json& j) {
  if (j.is_object()) return JointDistribution(matrix_from_json(field(j, "joint"), "joint distribution"));
  return JointDistribution(matrix_from_json(j, "joint distribution"));
}

Json to_json(const JointDistribution& p) { return {{"joint", matrix_to_json(p.matrix())}}; }

Distribution distribution_from_json(const Json& j) {
  if (j.is_object()) return Distribution(vector_from_json(field(j, "probs"), "distribution"));
  return Distribution(vector_from_json(j, "distribution"));
}

Json to_json(const Distribution& p) { return vector_to_json(p.probs()); }

BayesNet bayesnet_from_json(const Json& j) {
  const Json& source = field(j, "source");
  if (!source.is_string()) throw Error(kModule, "'source' must be a string");
  const Json& nodes = field(j, "nodes");
  if (!nodes.is_array()) throw Error(kModule, "'nodes' must be an array");
  std::vector<NetNode> parsed;
  for (const Json& n : nodes) {
    NetNode node;
    const Json& id = field(n, "id");
    if (!id.is_string()) throw Error(kModule, "node 'id' must be a string");
    node.id = id.get<std::string>();
    if (n.contains("parents")) {
      if (!n.at("parents").is_array()) throw Error(kModule, "node '" + node.id + "' parents must be an array");
      for (const Json& p : n.at("parents")) {
        if (!p.is_string()) throw Error(kModule, "node '" + node.id + "' parent ids must be strings");
        node.parents.push_back(p.get<std::string>());
      }
    }
    if (n.contains("eta")) node.eta = number(n, "eta");
    if (n.contains("kernel")) node.kernel = channel_from_json(n.at("kernel"));
    if (n.contains("marginal")) node.marginal = distribution_from_json(n.at("marginal"));
    if (n.contains("alphabet")) {
      if (!n.at("alphabet").is_number_integer()) throw Error(kModule, "'alphabet' must be an integer");
      node.alphabet = n.at("alphabet").get<Index>();
    }
    parsed.push_back(std::move(node));
  }
  return BayesNet(source.get<std::string>(), std::move(parsed));
}

Json to_json(const BayesNet& net) {
  Json nodes = Json::array();
  for (Index i = 0; i < net.size(); ++i) {
    const NetNode& node = net.node(i);
    Json n = {{"id", node.id}, {"parents", node.parents}};
    if (node.eta) n["eta"] = *node.eta;
    if (node.kernel) n["kernel"] = to_json(*node.kernel);
    if (node.marginal) n["marginal"] = to_json(*node.marginal);
    if (node.alphabet) n["alphabet"] = *node.alphabet;
    nodes.push_back(std::move(n));
  }
  return {{"source", net.node(0).id}, {"nodes", nodes}};
}

Channel parse_channel_spec(const std::string& spec) {
  if (spec.rfind("file:", 0) == 0) {
    const std::string path = spec.substr(5);
    if (path.empty()) throw Error(kModule, "channel spec 'file:' needs a path");
    return channel_from_json(load_json_file(path));
  }
  const std::vector<std::string> parts = split(spec, ':');
  if (parts.size() == 2 && parts[0] == "bsc") return make_bsc(parse_double(parts[1], "channel spec"));
  if (parts.size() == 2 && parts[0].rfind("bsc^", 0) == 0) {
    const int n = parse_int(parts[0].substr(4), "channel spec");
    if (n < 1) throw Error(kModule, "bsc^n needs n >= 1");
    return tensor_power(make_bsc(parse_double(parts[1], "channel spec")), n);
  }
  if (parts.size() == 3 && parts[0] == "ec") {
    return make_ec(parse_int(parts[1], "channel spec"), parse_double(parts[2], "channel spec"));
  }
  throw Error(kModule, "unrecognized channel spec '" + spec +
                           "' (expected bsc:<delta>, ec:<q>:<delta>, bsc^<n>:<delta> or file:<path>)");
}

Distribution parse_distribution_arg(const std::string& text) {
  if (text.rfind("file:", 0) == 0) return distribution_from_json(load_json_file(text.substr(5)));
  const std::vector<std::string> parts = split(text, ',');
  Eigen::VectorXd v(static_cast<Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v[static_cast<Index>(i)] = parse_double(parts[i], "distribution");
  return Distribution(std::move(v));
}

Json to_json(const EtaReport& r) {
  return {{"eta_tv", r.eta_tv},
          {"eta_kl", r.eta_kl},
          {"eta_chi2_sup", r.eta_chi2_sup},
          {"eta_kl_upper", r.eta_kl_upper},
          {"method", to_string(r.method)},
          {"certified", {{"eta_tv", r.tv_certified}, {"eta_kl", r.kl_certified}}},
          {"argmax_input", vector_to_json(r.argmax_input)},
          {"lecam_unimodal", r.lecam_unimodal}};
}

EtaReport eta_report_from_json(const Json& j) {
  EtaReport r;
  r.eta_tv = number(j, "eta_tv");
  r.eta_kl = number(j, "eta_kl");
  r.eta_chi2_sup = number(j, "eta_chi2_sup");
  r.eta_kl_upper = number(j, "eta_kl_upper");
  r.method = enum_from_string(field(j, "method").get<std::string>(),
                              {EtaMethod::DobrushinExact, EtaMethod::SpectralSup, EtaMethod::LeCamBinaryExact,
                               EtaMethod::GridLowerBound},
                              "method");
  const Json& cert = field(j, "certified");
  r.tv_certified = field(cert, "eta_tv").get<bool>();
  r.kl_certified = field(cert, "eta_kl").get<bool>();
  r.argmax_input = vector_from_json(field(j, "argmax_input"), "argmax_input");
  r.lecam_unimodal = field(j, "lecam_unimodal").get<bool>();
  for (double v : {r.eta_tv, r.eta_kl, r.eta_chi2_sup, r.eta_kl_upper}) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error(kModule, "eta report value outside [0,1]");
  }
  if (r.eta_kl != r.eta_chi2_sup) throw Error(kModule, "eta report: eta_kl and eta_chi2_sup differ");
  if (r.eta_kl > r.eta_tv + 1e-9) throw Error(kModule, "eta report: eta_kl exceeds eta_tv");
  if (r.eta_kl_upper + 1e-9 < r.eta_kl) throw Error(kModule, "eta report: upper bound below eta_kl");
  return r;
}

Json to_json(const PercResult& r) {
  return {{"value", r.value}, {"method", to_string(r.method)}, {"stderr", r.stderr_}};
}

PercResult perc_result_from_json(const Json& j) {
  PercResult r;
  r.value = number(j, "value");
  r.stderr_ = number(j, "stderr");
  r.method = enum_from_string(field(j, "method").get<std::string>(),
                              {PercMethod::ExactRecursion, PercMethod::ExactSubsetEnum, PercMethod::MonteCarlo},
                              "percolation method");
  if (!(r.value >= 0.0 && r.value <= 1.0)) throw Error(kModule, "percolation value outside [0,1]");
  if (r.method != PercMethod::MonteCarlo && r.stderr_ != 0.0) throw Error(kModule, "exact result with stderr");
  return r;
}

Json to_json(const Coupling& c) {
  return {{"coupling", matrix_to_json(c.joint)},
          {"index", "row (x,y) of P, column (x',y') of Q, flattened as x*|Y|+y"},
          {"p", to_json(c.left_marginal)},
          {"q", to_json(c.right_marginal)},
          {"cost", c.cost},
          {"prob_pair_differs", c.prob_pair_differs},
          {"prob_x_differs", c.prob_x_differs},
          {"prob_y_differs", c.prob_y_differs}};
}

Coupling coupling_from_json(const Json& j) {
  const JointDistribution p = joint_from_json(field(j, "p"));
  const JointDistribution q = joint_from_json(field(j, "q"));
  Coupling c{matrix_from_json(field(j, "coupling"), "coupling"), p, q};
  c.cost = number(j, "cost");
  c.prob_pair_differs = number(j, "prob_pair_differs");
  c.prob_x_differs = number(j, "prob_x_differs");
  c.prob_y_differs = number(j, "prob_y_differs");
  if (!coupling_marginals_match(c.joint, p, q, 1e-9)) throw Error(kModule, "coupling marginals do not match");
  return c;
}

Json to_json(const Curve& c) {
  return {{"t", c.t()}, {"value", c.values()}, {"interpretation", to_string(c.kind())}};
}

Curve curve_from_json(const Json& j) {
  const CurveKind kind = enum_from_string(field(j, "interpretation").get<std::string>(),
                                          {CurveKind::FLowerBound, CurveKind::FUpperBound, CurveKind::Exact},
                                          "interpretation");
  Curve c(field(j, "t").get<std::vector<double>>(), field(j, "value").get<std::vector<double>>(), kind);
  c.validate();
  return c;
}

Json to_json(const LessNoisyVerdict& v) {
  Json out = {{"verdict", to_string(v.outcome)}, {"trials", v.trials}, {"max_violation", v.max_violation}};
  if (v.witness) {
    out["witness_p_ux"] = matrix_to_json(*v.witness);
    out["witness_gap"] = v.witness_gap;
  }
  return out;
}

LessNoisyVerdict verdict_from_json(const Json& j) {
  LessNoisyVerdict v;
  v.outcome = enum_from_string(field(j, "verdict").get<std::string>(),
                               {LessNoisyOutcome::NotLessNoisy, LessNoisyOutcome::NoCounterexampleFound}, "verdict");
  v.trials = field(j, "trials").get<int>();
  v.max_violation = field(j, "max_violation").is_null() ? -kInf : number(j, "max_violation");
  if (j.contains("witness_p_ux")) {
    v.witness = matrix_from_json(j.at("witness_p_ux"), "witness");
    v.witness_gap = number(j, "witness_gap");
  }
  if (v.outcome == LessNoisyOutcome::NotLessNoisy && (!v.witness || !(v.witness_gap > 1e-9))) {
    throw Error(kModule, "NOT_LESS_NOISY verdict without a witness");
  }
  return v;
}

Json to_json(const Table1Row& r) {
  Json out = {{"name", r.name},
              {"graph", r.graph},
              {"sinks", r.sinks},
              {"formulas", {r.formulas[0], r.formulas[1], r.formulas[2]}},
              {"computed",
               {{"percolation", r.computed[0]}, {"shortcut_free", r.computed[1]}, {"all_paths", r.computed[2]}}}};
  if (r.in_table) {
    out["tabulated"] = {
        {"percolation", r.tabulated[0]}, {"shortcut_free", r.tabulated[1]}, {"all_paths", r.tabulated[2]}};
  }
  return out;
}

Json to_json(const BscSuiteRow& r) {
  Json out = {{"n", r.n},
              {"eta_tv_exact", r.eta_tv_exact},
              {"kl_feedback_bound", r.kl_feedback_bound},
              {"tv_product_bound", r.tv_product_bound},
              {"f_curve_bound_t1", r.f_curve_bound_t1},
              {"tv_ordering_holds", r.tv_ordering_holds},
              {"kl_ordering_holds", r.kl_ordering_holds}};
  if (r.eta_tv_computed) out["eta_tv_computed"] = *r.eta_tv_computed;
  if (r.eta_kl_oracle) out["eta_kl_oracle"] = *r.eta_kl_oracle;
  return out;
}

std::string curve_to_csv(const Curve& c, bool header) {
  std::ostringstream out;
  out.precision(17);
  if (header) out << "t,value,interpretation\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    out << c.t()[i] << ',' << c.values()[i] << ',' << to_string(c.kind()) << '\n';
  }
  return out.str();
}

}  // namespace sdpi
