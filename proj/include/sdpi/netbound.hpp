#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sdpi/channels.hpp"
#include "sdpi/probcore.hpp"

namespace sdpi {

/// One vertex of a Bayesian network. Non-source vertices with parents carry
/// either a scalar contraction coefficient or an explicit kernel whose input
/// alphabet is the product of the parents' alphabets (big-endian, in the
/// order of `parents`). Non-source roots carry a marginal.
struct NetNode {
  std::string id;
  std::vector<std::string> parents;
  std::optional<double> eta;
  std::optional<Channel> kernel;
  std::optional<Distribution> marginal;
  /// Alphabet size; only needed for the source when no kernel reveals it.
  std::optional<Index> alphabet;
};

enum class Coefficient { KL, TV };

/// Validated DAG. Nodes are stored in a topological order with the source
/// first; node indices below refer to that order.
class BayesNet {
 public:
  /// The source may be listed in `nodes` or left implicit.
  BayesNet(std::string source, std::vector<NetNode> nodes);

  Index size() const { return static_cast<Index>(nodes_.size()); }
  Index source() const { return 0; }
  const NetNode& node(Index i) const { return nodes_[i]; }
  const std::vector<Index>& parents(Index i) const { return parents_[i]; }
  Index index_of(const std::string& id) const;
  std::vector<Index> indices_of(const std::vector<std::string>& ids) const;

  /// Per-node coefficients (source entry is 1). Kernels are turned into
  /// certified upper bounds: eta_TV for TV; for KL the exact value on
  /// binary inputs, eta_TV otherwise. Computed once per kind.
  const std::vector<double>& etas(Coefficient kind) const;

  /// Copy with every non-source, non-root node's coefficient replaced by
  /// the given values (indexed like nodes).
  BayesNet with_etas(const std::vector<double>& etas) const;

  /// Alphabet size of node i if it can be determined.
  std::optional<Index> alphabet(Index i) const;

 private:
  std::vector<NetNode> nodes_;
  std::vector<std::vector<Index>> parents_;
  std::unordered_map<std::string, Index> index_;
  mutable std::optional<std::vector<double>> kl_etas_;
  mutable std::optional<std::vector<double>> tv_etas_;
};

enum class PercMethod { ExactRecursion, ExactSubsetEnum, MonteCarlo };
const char* to_string(PercMethod method);

struct PercResult {
  double value = 0.0;
  PercMethod method = PercMethod::ExactSubsetEnum;
  double stderr_ = 0.0;
};

/// Networks whose relevant part (ancestors of the sinks) has at most this
/// many non-source nodes are evaluated by subset enumeration.
inline constexpr int kSubsetEnumLimit = 24;

/// Probability that some source-to-sink path survives when every
/// non-source node v is kept independently with probability eta_v.
PercResult perc_exact(const BayesNet& net, const std::vector<std::string>& sinks,
                      Coefficient kind = Coefficient::KL);

/// Monte Carlo estimate of the same probability. Samples are split over
/// `shards` streams seeded by split_seed(seed, shard).
PercResult perc_mc(const BayesNet& net, const std::vector<std::string>& sinks,
                   std::int64_t samples, std::uint64_t seed, int shards = 8,
                   Coefficient kind = Coefficient::KL);

/// Peeling recursion on the topologically last sink, memoized on the sink
/// set after dropping sinks that are only reachable through other sinks.
double es_recursion_bound(const BayesNet& net, const std::vector<std::string>& sinks,
                          Coefficient kind = Coefficient::KL);

enum class ShortcutRule {
  /// No other source-to-sink path uses a strict subset of the vertices.
  VertexSet,
  /// No proper prefix of the path ends in the sink set.
  EdgeSet,
};

struct PathSums {
  double shortcut_free = 0.0;
  double all_paths = 0.0;
  std::int64_t path_count = 0;
  std::int64_t shortcut_free_count = 0;
};

inline constexpr std::int64_t kPathCountCap = 1000000;

PathSums path_sum_bounds(const BayesNet& net, const std::vector<std::string>& sinks,
                         ShortcutRule rule = ShortcutRule::VertexSet,
                         Coefficient kind = Coefficient::KL);

/// perc_exact with eta_TV coefficients.
double tv_network_bound(const BayesNet& net, const std::vector<std::string>& sinks);

/// Explicit channel from the source to the sink tuple (big-endian in the
/// order given), marginalizing everything else. Needs kernels and marginals
/// on every ancestor of the sinks.
Channel network_channel(const BayesNet& net, const std::vector<std::string>& sinks,
                        Index cap = kDefaultTensorCap);

/// Small networks used throughout: all kernels are scalar `eta`.
BayesNet markov_chain(int length, double eta);        // X -> Y1 -> ... -> Yn
BayesNet feedback_chain(int n, double eta);           // Yk has parents X, Y(k-1)
BayesNet parallel_channels(int n, double eta);        // X -> Y1..Yn

struct Table1Row {
  std::string name;
  std::string graph;
  std::string sinks;
  std::string formulas[3];
  /// False for rows added beside the table (no printed values).
  bool in_table = true;
  double tabulated[3] = {0.0, 0.0, 0.0};
  /// perc_exact, shortcut-free sum, all-paths sum on the network.
  double computed[3] = {0.0, 0.0, 0.0};
};

/// Rows of the comparison table: three bounds on eta_KL for four small
/// graphs, as tabulated and as computed. The first chain also appears with
/// the single sink {Y2}.
std::vector<Table1Row> table1(double eta);

}  // namespace sdpi
