#include "sdpi/netbound.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "sdpi/contraction.hpp"
#include "sdpi/sampling.hpp"

namespace sdpi {
namespace {

constexpr std::string_view kModule = "netbound";
using Mask = std::uint64_t;
constexpr Index kMaskNodes = 64;

Mask bit(Index i) { return Mask(1) << i; }

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

// Bitmask view of a network for the percolation routines.
struct Graph {
  Index n = 0;
  std::vector<Mask> parents;
  std::vector<double> eta;  // keep probability, source entry unused
};

Graph make_graph(const BayesNet& net, Coefficient kind) {
  if (net.size() > kMaskNodes) {
    std::ostringstream msg;
    msg << "percolation routines support at most " << kMaskNodes << " nodes, network has " << net.size();
    throw Error(kModule, msg.str());
  }
  Graph g;
  g.n = net.size();
  g.parents.assign(g.n, 0);
  for (Index i = 0; i < g.n; ++i) {
    for (Index p : net.parents(i)) g.parents[i] |= bit(p);
  }
  g.eta = net.etas(kind);
  return g;
}

Mask sink_mask(const BayesNet& net, const std::vector<std::string>& sinks) {
  if (sinks.empty()) throw Error(kModule, "sink set is empty");
  Mask m = 0;
  for (Index i : net.indices_of(sinks)) m |= bit(i);
  return m;
}

// Ancestors of `targets` (inclusive).
Mask ancestors(const Graph& g, Mask targets) {
  Mask result = targets;
  for (Index i = g.n; i-- > 0;) {
    if (result & bit(i)) result |= g.parents[i];
  }
  return result;
}

// Nodes reachable from the source using only nodes in `alive` (source always alive).
Mask reachable(const Graph& g, Mask alive) {
  Mask reached = bit(0);
  for (Index i = 1; i < g.n; ++i) {
    if ((alive & bit(i)) && (g.parents[i] & reached)) reached |= bit(i);
  }
  return reached;
}

std::vector<Index> members(Mask m) {
  std::vector<Index> out;
  for (Index i = 0; m != 0; ++i, m >>= 1) {
    if (m & 1) out.push_back(i);
  }
  return out;
}

double subset_enumeration(const Graph& g, Mask sinks) {
  const std::vector<Index> relevant = members(ancestors(g, sinks) & ~bit(0));
  const auto k = static_cast<int>(relevant.size());
  double total = 0.0;
  for (std::uint64_t subset = 0; subset < (std::uint64_t(1) << k); ++subset) {
    double prob = 1.0;
    Mask alive = 0;
    for (int j = 0; j < k; ++j) {
      const double e = g.eta[relevant[j]];
      if (subset & (std::uint64_t(1) << j)) {
        prob *= e;
        alive |= bit(relevant[j]);
      } else {
        prob *= 1.0 - e;
      }
      if (prob == 0.0) break;
    }
    if (prob == 0.0) continue;
    if (reachable(g, alive) & sinks) total += prob;
  }
  return total;
}

// Drops sinks that every source path reaches only after visiting another sink,
// and sinks unreachable from the source.
Mask reduce_sinks(const Graph& g, Mask sinks) {
  Mask kept = sinks;
  for (Index v : members(sinks)) {
    const Mask others = kept & ~bit(v);
    const Mask alive = ~others;
    if (!(reachable(g, alive) & bit(v))) kept &= ~bit(v);
  }
  return kept;
}

class Recursion {
 public:
  explicit Recursion(const Graph& g) : g_(g) {}

  double operator()(Mask sinks) {
    if (sinks & bit(0)) return 1.0;
    sinks = reduce_sinks(g_, sinks);
    if (sinks == 0) return 0.0;
    if (auto it = memo_.find(sinks); it != memo_.end()) return it->second;
    Index last = 0;
    for (Index i = g_.n; i-- > 0;) {
      if (sinks & bit(i)) {
        last = i;
        break;
      }
    }
    const Mask rest = sinks & ~bit(last);
    const double e = g_.eta[last];
    double value = 0.0;
    if (e < 1.0) value += (1.0 - e) * (*this)(rest);
    if (e > 0.0) value += e * (*this)(rest | g_.parents[last]);
    memo_.emplace(sinks, value);
    return value;
  }

 private:
  const Graph& g_;
  std::unordered_map<Mask, double> memo_;
};

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

BayesNet::BayesNet(std::string source, std::vector<NetNode> nodes) {
  // Collect nodes, inserting an implicit source.
  std::unordered_map<std::string, std::size_t> position;
  bool has_source = false;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id.empty()) throw Error(kModule, "node with empty id");
    if (!position.emplace(nodes[i].id, i).second) throw Error(kModule, "duplicate node id '" + nodes[i].id + "'");
    if (nodes[i].id == source) has_source = true;
  }
  if (!has_source) {
    NetNode s;
    s.id = source;
    position.emplace(source, nodes.size());
    nodes.push_back(std::move(s));
  }
  for (const NetNode& node : nodes) {
    for (const std::string& p : node.parents) {
      if (!position.count(p)) throw Error(kModule, "node '" + node.id + "' has unknown parent '" + p + "'");
      if (p == node.id) throw Error(kModule, "node '" + node.id + "' is its own parent");
    }
    if (node.id == source) {
      if (!node.parents.empty()) throw Error(kModule, "source '" + source + "' has parents");
      continue;
    }
    if (node.parents.empty()) {
      if (!node.marginal) throw Error(kModule, "non-source root '" + node.id + "' needs a marginal");
    } else {
      if (node.eta.has_value() == node.kernel.has_value()) {
        throw Error(kModule, "node '" + node.id + "' needs exactly one of eta or kernel");
      }
      if (node.eta && !in_unit(*node.eta)) throw Error(kModule, "node '" + node.id + "' has eta outside [0,1]");
    }
  }

  // Kahn's algorithm, source first, ties broken by input order.
  std::vector<int> indegree(nodes.size(), 0);
  std::vector<std::vector<std::size_t>> children(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (const std::string& p : nodes[i].parents) {
      children[position[p]].push_back(i);
      ++indegree[i];
    }
  }
  std::vector<std::size_t> order;
  std::vector<std::size_t> ready;
  const std::size_t source_pos = position[source];
  order.push_back(source_pos);
  for (std::size_t c : children[source_pos]) --indegree[c];
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i != source_pos && indegree[i] == 0) ready.push_back(i);
  }
  while (!ready.empty()) {
    const auto it = std::min_element(ready.begin(), ready.end());
    const std::size_t i = *it;
    ready.erase(it);
    order.push_back(i);
    for (std::size_t c : children[i]) {
      if (--indegree[c] == 0) ready.push_back(c);
    }
  }
  if (order.size() != nodes.size()) throw Error(kModule, "graph has a directed cycle");

  nodes_.reserve(nodes.size());
  for (std::size_t i : order) {
    index_.emplace(nodes[i].id, static_cast<Index>(nodes_.size()));
    nodes_.push_back(std::move(nodes[i]));
  }
  parents_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (const std::string& p : nodes_[i].parents) parents_[i].push_back(index_.at(p));
  }

  // Kernel shapes, where parent alphabets are known.
  for (Index i = 1; i < size(); ++i) {
    const NetNode& node = nodes_[i];
    if (node.marginal && node.alphabet && *node.alphabet != node.marginal->size()) {
      throw Error(kModule, "node '" + node.id + "' marginal size disagrees with its alphabet");
    }
    if (!node.kernel) continue;
    Index rows = 1;
    bool known = true;
    for (Index p : parents_[i]) {
      const auto a = alphabet(p);
      if (!a) {
        known = false;
        break;
      }
      rows *= *a;
    }
    if (known && rows != node.kernel->input_size()) {
      std::ostringstream msg;
      msg << "kernel of '" << node.id << "' has " << node.kernel->input_size()
          << " rows, parents need " << rows;
      throw Error(kModule, msg.str());
    }
  }
}

Index BayesNet::index_of(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw Error(kModule, "unknown node id '" + id + "'");
  return it->second;
}

std::vector<Index> BayesNet::indices_of(const std::vector<std::string>& ids) const {
  std::vector<Index> out;
  out.reserve(ids.size());
  for (const std::string& id : ids) out.push_back(index_of(id));
  return out;
}

std::optional<Index> BayesNet::alphabet(Index i) const {
  const NetNode& node = nodes_[i];
  if (node.alphabet) return node.alphabet;
  if (node.kernel) return node.kernel->output_size();
  if (node.marginal) return node.marginal->size();
  // Infer the size from a child kernel whose only parent is this node.
  for (Index c = i + 1; c < size(); ++c) {
    if (parents_[c].size() == 1 && parents_[c][0] == i && nodes_[c].kernel) {
      return nodes_[c].kernel->input_size();
    }
  }
  return std::nullopt;
}

const std::vector<double>& BayesNet::etas(Coefficient kind) const {
  auto& cache = kind == Coefficient::KL ? kl_etas_ : tv_etas_;
  if (cache) return *cache;
  std::vector<double> values(nodes_.size(), 0.0);
  values[0] = 1.0;
  for (Index i = 1; i < size(); ++i) {
    const NetNode& node = nodes_[i];
    if (parents_[i].empty()) continue;  // roots never carry a source path
    if (node.eta) {
      values[i] = *node.eta;
    } else {
      values[i] = kind == Coefficient::TV ? eta_tv(*node.kernel) : eta_kl_certified_upper(*node.kernel);
    }
  }
  cache = std::move(values);
  return *cache;
}

BayesNet BayesNet::with_etas(const std::vector<double>& etas) const {
  if (static_cast<Index>(etas.size()) != size()) throw Error(kModule, "eta vector size mismatch");
  std::vector<NetNode> copy = nodes_;
  for (Index i = 1; i < size(); ++i) {
    if (parents_[i].empty()) continue;
    copy[i].eta = etas[i];
    copy[i].kernel.reset();
  }
  return BayesNet(nodes_[0].id, std::move(copy));
}

const char* to_string(PercMethod method) {
  switch (method) {
    case PercMethod::ExactRecursion: return "EXACT_RECURSION";
    case PercMethod::ExactSubsetEnum: return "EXACT_SUBSET_ENUM";
    case PercMethod::MonteCarlo: return "MONTE_CARLO";
  }
  return "UNKNOWN";
}

PercResult perc_exact(const BayesNet& net, const std::vector<std::string>& sinks, Coefficient kind) {
  const Mask targets = sink_mask(net, sinks);
  const Graph g = make_graph(net, kind);
  PercResult result;
  if (targets & bit(0)) {
    result.value = 1.0;
    return result;
  }
  const auto relevant = members(ancestors(g, targets) & ~bit(0)).size();
  if (relevant <= static_cast<std::size_t>(kSubsetEnumLimit)) {
    result.value = clamp_unit(subset_enumeration(g, targets));
    result.method = PercMethod::ExactSubsetEnum;
  } else {
    Recursion recursion(g);
    result.value = clamp_unit(recursion(targets));
    result.method = PercMethod::ExactRecursion;
  }
  return result;
}

double es_recursion_bound(const BayesNet& net, const std::vector<std::string>& sinks, Coefficient kind) {
  const Mask targets = sink_mask(net, sinks);
  const Graph g = make_graph(net, kind);
  Recursion recursion(g);
  return clamp_unit(recursion(targets));
}

PercResult perc_mc(const BayesNet& net, const std::vector<std::string>& sinks, std::int64_t samples,
                   std::uint64_t seed, int shards, Coefficient kind) {
  if (samples < 1) throw Error(kModule, "Monte Carlo needs at least one sample");
  if (shards < 1) throw Error(kModule, "Monte Carlo needs at least one shard");
  const Mask targets = sink_mask(net, sinks);
  const Graph g = make_graph(net, kind);
  PercResult result;
  result.method = PercMethod::MonteCarlo;
  if (targets & bit(0)) {
    result.value = 1.0;
    return result;
  }
  const std::vector<Index> relevant = members(ancestors(g, targets) & ~bit(0));
  std::int64_t hits = 0;
  for (int shard = 0; shard < shards; ++shard) {
    const std::int64_t count = samples / shards + (shard < samples % shards ? 1 : 0);
    Rng rng(split_seed(seed, static_cast<std::uint64_t>(shard)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::int64_t s = 0; s < count; ++s) {
      Mask reached = bit(0);
      for (Index v : relevant) {
        if ((g.parents[v] & reached) && unit(rng) < g.eta[v]) reached |= bit(v);
      }
      if (reached & targets) ++hits;
    }
  }
  const double n = static_cast<double>(samples);
  result.value = static_cast<double>(hits) / n;
  result.stderr_ = std::sqrt(result.value * (1.0 - result.value) / n);
  return result;
}

PathSums path_sum_bounds(const BayesNet& net, const std::vector<std::string>& sinks, ShortcutRule rule,
                         Coefficient kind) {
  const Mask targets = sink_mask(net, sinks);
  const Graph g = make_graph(net, kind);
  const Index n = g.n;

  // Paths ending at each node inside an allowed vertex set, counted by DP.
  auto count_paths = [&](Mask allowed) {
    std::vector<double> ending(n, 0.0);
    ending[0] = 1.0;
    double total = (targets & bit(0)) ? 1.0 : 0.0;
    for (Index i = 1; i < n; ++i) {
      if (!(allowed & bit(i))) continue;
      for (Index p : members(g.parents[i] & allowed)) ending[i] += ending[p];
      if (targets & bit(i)) total += ending[i];
    }
    return total;
  };
  const Mask everything = n == kMaskNodes ? ~Mask(0) : bit(n) - 1;
  if (count_paths(everything) > static_cast<double>(kPathCountCap)) {
    throw Error(kModule, "number of source-to-sink paths exceeds the cap of 1000000");
  }

  std::vector<std::vector<Index>> children(n);
  for (Index i = 1; i < n; ++i) {
    for (Index p : members(g.parents[i])) children[p].push_back(i);
  }

  PathSums sums;
  std::vector<Index> path{0};
  std::function<void(Mask, double, bool)> walk = [&](Mask vertices, double weight, bool passed_sink) {
    const Index tail = path.back();
    if (targets & bit(tail)) {
      ++sums.path_count;
      sums.all_paths += weight;
      const bool shortcut_free = rule == ShortcutRule::EdgeSet ? !passed_sink : count_paths(vertices) == 1.0;
      if (shortcut_free) {
        ++sums.shortcut_free_count;
        sums.shortcut_free += weight;
      }
    }
    const bool now_passed = passed_sink || (targets & bit(tail)) != 0;
    for (Index c : children[tail]) {
      path.push_back(c);
      walk(vertices | bit(c), weight * g.eta[c], now_passed);
      path.pop_back();
    }
  };
  walk(bit(0), 1.0, false);
  return sums;
}

double tv_network_bound(const BayesNet& net, const std::vector<std::string>& sinks) {
  return perc_exact(net, sinks, Coefficient::TV).value;
}

Channel network_channel(const BayesNet& net, const std::vector<std::string>& sinks, Index cap) {
  const std::vector<Index> sink_idx = net.indices_of(sinks);
  if (sink_idx.empty()) throw Error(kModule, "sink set is empty");
  // Ancestor closure.
  std::vector<bool> needed(net.size(), false);
  for (Index s : sink_idx) needed[s] = true;
  for (Index i = net.size(); i-- > 0;) {
    if (!needed[i]) continue;
    for (Index p : net.parents(i)) needed[p] = true;
  }
  std::vector<Index> sizes(net.size(), 0);
  Index states = 1;
  for (Index i = 0; i < net.size(); ++i) {
    if (!needed[i] && i != 0) continue;
    const auto a = net.alphabet(i);
    if (!a) throw Error(kModule, "alphabet of node '" + net.node(i).id + "' is unknown");
    sizes[i] = *a;
    if (i == 0) continue;
    const NetNode& node = net.node(i);
    if (!net.parents(i).empty() && !node.kernel) {
      throw Error(kModule, "node '" + node.id + "' has no kernel; the composite channel needs all kernels");
    }
    if (states > cap / sizes[i]) throw Error(kModule, "composite channel state space exceeds the cap");
    states *= sizes[i];
  }
  std::vector<Index> radices;
  for (Index s : sink_idx) radices.push_back(sizes[s]);
  Index outputs = 1;
  for (Index r : radices) {
    if (outputs > cap / r) throw Error(kModule, "composite channel output alphabet exceeds the cap");
    outputs *= r;
  }
  const Index inputs = sizes[0];
  if (inputs > cap / outputs) throw Error(kModule, "composite channel exceeds the cap");

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(inputs, outputs);
  std::vector<Index> value(net.size(), 0);
  std::function<void(Index, double)> assign = [&](Index i, double prob) {
    if (prob == 0.0) return;
    if (i == net.size()) {
      std::vector<Index> digits;
      for (Index s : sink_idx) digits.push_back(value[s]);
      m(value[0], encode_multi_index(digits, radices)) += prob;
      return;
    }
    if (!needed[i]) {
      assign(i + 1, prob);
      return;
    }
    const NetNode& node = net.node(i);
    if (net.parents(i).empty()) {
      for (Index v = 0; v < sizes[i]; ++v) {
        value[i] = v;
        assign(i + 1, prob * (*node.marginal)[v]);
      }
      return;
    }
    std::vector<Index> digits, parent_radices;
    for (Index p : net.parents(i)) {
      digits.push_back(value[p]);
      parent_radices.push_back(sizes[p]);
    }
    const Index row = encode_multi_index(digits, parent_radices);
    for (Index v = 0; v < sizes[i]; ++v) {
      value[i] = v;
      assign(i + 1, prob * (*node.kernel)(row, v));
    }
  };
  for (Index x = 0; x < inputs; ++x) {
    value[0] = x;
    assign(1, 1.0);
  }
  return Channel(std::move(m));
}

BayesNet markov_chain(int length, double eta) {
  std::vector<NetNode> nodes;
  std::string prev = "X";
  for (int k = 1; k <= length; ++k) {
    NetNode node;
    node.id = "Y" + std::to_string(k);
    node.parents = {prev};
    node.eta = eta;
    prev = node.id;
    nodes.push_back(std::move(node));
  }
  return BayesNet("X", std::move(nodes));
}

BayesNet feedback_chain(int n, double eta) {
  std::vector<NetNode> nodes;
  for (int k = 1; k <= n; ++k) {
    NetNode node;
    node.id = "Y" + std::to_string(k);
    node.parents = {"X"};
    if (k > 1) node.parents.push_back("Y" + std::to_string(k - 1));
    node.eta = eta;
    nodes.push_back(std::move(node));
  }
  return BayesNet("X", std::move(nodes));
}

BayesNet parallel_channels(int n, double eta) {
  std::vector<NetNode> nodes;
  for (int k = 1; k <= n; ++k) {
    NetNode node;
    node.id = "Y" + std::to_string(k);
    node.parents = {"X"};
    node.eta = eta;
    nodes.push_back(std::move(node));
  }
  return BayesNet("X", std::move(nodes));
}

std::vector<Table1Row> table1(double eta) {
  if (!in_unit(eta)) throw Error(kModule, "eta outside [0,1]");
  const double e = eta;
  auto scalar = [&](std::string id, std::vector<std::string> parents) {
    NetNode node;
    node.id = std::move(id);
    node.parents = std::move(parents);
    node.eta = e;
    return node;
  };
  const BayesNet chain1("X", {scalar("Y1", {"X"}), scalar("B", {"Y1"}), scalar("Y2", {"B"})});
  const BayesNet chain2("X", {scalar("A", {"X"}), scalar("B", {"X", "A"}), scalar("Y", {"B"})});
  const BayesNet parallel("X", {scalar("Y1", {"X"}), scalar("Y2", {"X"})});
  const BayesNet feedback("X", {scalar("Y1", {"X"}), scalar("Y2", {"X", "Y1"})});

  auto row = [&](std::string name, std::string graph, const BayesNet& net, std::vector<std::string> sinks,
                 std::array<std::string, 3> formulas, std::array<double, 3> tabulated) {
    Table1Row r;
    r.name = std::move(name);
    r.graph = std::move(graph);
    r.sinks = "{";
    for (std::size_t i = 0; i < sinks.size(); ++i) r.sinks += (i ? "," : "") + sinks[i];
    r.sinks += "}";
    for (int k = 0; k < 3; ++k) {
      r.formulas[k] = formulas[k];
      r.tabulated[k] = tabulated[k];
    }
    const PathSums sums = path_sum_bounds(net, sinks);
    r.computed[0] = perc_exact(net, sinks).value;
    r.computed[1] = sums.shortcut_free;
    r.computed[2] = sums.all_paths;
    return r;
  };

  std::vector<Table1Row> rows;
  rows.push_back(row("Markov chain 1", "X->Y1->B->Y2", chain1, {"Y1", "Y2"}, {"eta", "eta", "eta+eta^3"},
                     {e, e, e + e * e * e}));
  rows.push_back(row("Markov chain 2", "X->A, X->B, A->B, B->Y", chain2, {"Y"},
                     {"eta^2", "eta^2", "eta^2+eta^3"}, {e * e, e * e, e * e + e * e * e}));
  rows.push_back(row("Parallel channels", "X->Y1, X->Y2", parallel, {"Y1", "Y2"}, {"2eta-eta^2", "2eta", "2eta"},
                     {2 * e - e * e, 2 * e, 2 * e}));
  rows.push_back(row("Parallel channels with feedback", "X->Y1, X->Y2, Y1->Y2", feedback, {"Y1", "Y2"},
                     {"2eta-eta^2", "2eta", "3eta"}, {2 * e - e * e, 2 * e, 3 * e}));
  rows.push_back(row("Markov chain 1 (sink Y2 only)", "X->Y1->B->Y2", chain1, {"Y2"},
                     {"eta^3", "eta^3", "eta^3"}, {0.0, 0.0, 0.0}));
  rows.back().in_table = false;
  return rows;
}

}  // namespace sdpi
