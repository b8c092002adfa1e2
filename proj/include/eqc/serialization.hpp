#pragma once

// JSON forms of lattice states, reports and gate macros.
//
//   BasisConfig  [[a,b,p], ...]
//   MixedState   {"branches": [{"weight": w, "terms": [{"config": ..., "re": x, "im": y}]}]}
//   GateMacro    {"op": "cz", "q1": 1, "q2": 2} | {"op": "phase", "q": 1, "phi": 0.5}
//                | {"op": "h", "q": 1} | {"op": "measure", "q": 1, "rest": 3, "up": false}

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "eqc/gates.hpp"
#include "eqc/lattice.hpp"
#include "eqc/protocols.hpp"
#include "eqc/stats.hpp"

namespace eqc {

using Json = nlohmann::ordered_json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json to_json(const BasisConfig& config);
BasisConfig config_from_json(const Json& j);

Json to_json(const MixedState& state);
MixedState state_from_json(const Json& j);

/// Accepts either a bare configuration array or a state object.
MixedState lattice_from_json(const Json& j, const Limits& limits = {});

Json to_json(const ComputerDescriptor& d);
Json to_json(const std::vector<ComputerDescriptor>& ds);
Json to_json(const RepairReport& r);
Json to_json(const YieldReport& r, bool include_trials = false);
Json to_json(const RepairExperimentReport& r);

Json to_json(const GateMacro& macro);
GateMacro macro_from_json(const Json& j);
std::vector<GateMacro> macros_from_json(const Json& j);

/// {"qubits": [...], "leakage": x, "matrix": [[{"re":..,"im":..}, ...], ...]}
Json to_json(const LogicalUnitary& u);

/// Parses text, converting parse failures into FormatError with the
/// parser's diagnostics.
Json parse_json(const std::string& text);

}  // namespace eqc
