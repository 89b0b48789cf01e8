#pragma once

#include <string>

#include <json.hpp>

#include "sdpi/bsc_suite.hpp"
#include "sdpi/channels.hpp"
#include "sdpi/contraction.hpp"
#include "sdpi/coupling.hpp"
#include "sdpi/ficurve.hpp"
#include "sdpi/netbound.hpp"
#include "sdpi/ordering.hpp"

namespace sdpi {

using Json = nlohmann::json;

/// Reads and parses a JSON file; errors are reported as sdpi::Error("io", ...).
Json load_json_file(const std::string& path);

// Channels are {"matrix": [[...], ...]} or a bare array of rows; joints are
// {"joint": [[...]]} or a bare array; distributions are flat arrays.
Channel channel_from_json(const Json& j);
Json to_json(const Channel& w);
JointDistribution joint_from_json(const Json& j);
Json to_json(const JointDistribution& p);
Distribution distribution_from_json(const Json& j);
Json to_json(const Distribution& p);

/// {"source": "X", "nodes": [{"id", "parents", "eta" | "kernel" | "marginal", "alphabet"?}]}
BayesNet bayesnet_from_json(const Json& j);
Json to_json(const BayesNet& net);

/// Channel mini-language: "bsc:<delta>", "ec:<q>:<delta>", "bsc^<n>:<delta>",
/// "file:<path.json>". Anything else is rejected.
Channel parse_channel_spec(const std::string& spec);

/// Distribution from "0.2,0.8" or "file:<path.json>".
Distribution parse_distribution_arg(const std::string& text);

// Result artifacts. Each from_json re-validates the type's invariants.
Json to_json(const EtaReport& r);
EtaReport eta_report_from_json(const Json& j);
Json to_json(const PercResult& r);
PercResult perc_result_from_json(const Json& j);
Json to_json(const Coupling& c);
Coupling coupling_from_json(const Json& j);
Json to_json(const Curve& c);
Curve curve_from_json(const Json& j);
Json to_json(const LessNoisyVerdict& v);
LessNoisyVerdict verdict_from_json(const Json& j);
Json to_json(const Table1Row& r);
Json to_json(const BscSuiteRow& r);

/// "t,value,interpretation" rows, one per knot.
std::string curve_to_csv(const Curve& c, bool header = true);

}  // namespace sdpi
