#include "eqc/serialization.hpp"

namespace eqc {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

int count_from_json(const Json& j) {
  if (!j.is_number_integer()) throw FormatError("occupation counts must be integers");
  const auto v = j.get<long long>();
  if (v < 0 || v > 255) throw FormatError("occupation count out of range: " + j.dump());
  return static_cast<int>(v);
}

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    throw FormatError(std::string("missing field '") + name + "'");
  }
  return j.at(name);
}

int int_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_number_integer()) throw FormatError(std::string("field '") + name + "' must be an integer");
  return v.get<int>();
}

double number_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_number()) throw FormatError(std::string("field '") + name + "' must be a number");
  return v.get<double>();
}

}  // namespace

Json to_json(const BasisConfig& config) {
  Json arr = Json::array();
  for (const auto& s : config) arr.push_back({int(s.a), int(s.b), int(s.p)});
  return arr;
}

BasisConfig config_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) {
    throw FormatError("configuration must be a non-empty array of [a,b,p] triples");
  }
  std::vector<SiteOccupancy> sites;
  sites.reserve(j.size());
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != 3) {
      throw FormatError("site must be an [a,b,p] triple, got " + t.dump());
    }
    sites.emplace_back(count_from_json(t[0]), count_from_json(t[1]), count_from_json(t[2]));
  }
  return BasisConfig(std::move(sites));
}

Json to_json(const MixedState& state) {
  Json branches = Json::array();
  for (const auto& br : state.branches()) {
    Json terms = Json::array();
    for (const auto& [cfg, amp] : br.state.terms()) {
      terms.push_back({{"config", to_json(cfg)}, {"re", amp.real()}, {"im", amp.imag()}});
    }
    branches.push_back({{"weight", br.weight}, {"terms", std::move(terms)}});
  }
  return Json{{"branches", std::move(branches)}};
}

MixedState state_from_json(const Json& j) {
  const Json& branches = field(j, "branches");
  if (!branches.is_array() || branches.empty()) throw FormatError("'branches' must be a non-empty array");
  std::vector<Branch> out;
  try {
    for (const auto& b : branches) {
      PureState::TermMap terms;
      const Json& tj = field(b, "terms");
      if (!tj.is_array()) throw FormatError("'terms' must be an array");
      for (const auto& t : tj) {
        terms[config_from_json(field(t, "config"))] +=
            Amplitude{number_field(t, "re"), number_field(t, "im")};
      }
      out.push_back(Branch{number_field(b, "weight"), PureState::from_terms(std::move(terms))});
    }
    return MixedState::from_branches(std::move(out));
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(std::string("invalid state: ") + e.what());
  }
}

MixedState lattice_from_json(const Json& j, const Limits& limits) {
  if (j.is_array()) return classical(config_from_json(j), limits);
  MixedState state = state_from_json(j);
  for (const auto& br : state.branches()) {
    for (const auto& [cfg, amp] : br.state.terms()) check_limits(cfg, limits);
  }
  return state;
}

Json to_json(const ComputerDescriptor& d) {
  return Json{{"home", d.home}, {"n", d.n}, {"qubit_sites", d.qubit_sites}};
}

Json to_json(const std::vector<ComputerDescriptor>& ds) {
  Json arr = Json::array();
  for (const auto& d : ds) arr.push_back(to_json(d));
  return arr;
}

Json to_json(const RepairReport& r) {
  return Json{{"defects_fixed", r.defects_fixed},
              {"atoms_lost", r.atoms_lost},
              {"rounds", r.rounds},
              {"empty_fixed", r.empty_fixed},
              {"single_fixed", r.single_fixed},
              {"residual_empty", r.residual_empty},
              {"residual_single", r.residual_single},
              {"donors_remaining", r.donors_remaining}};
}

Json to_json(const YieldReport& r, bool include_trials) {
  Json j{{"trials", r.trials},
         {"mean", r.mean},
         {"stderr", r.stderr_mean},
         {"prediction", r.prediction},
         {"z_score", r.z_score}};
  if (include_trials) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < r.counts.size(); ++i) {
      rows.push_back({{"seed", r.seeds[i]}, {"count", r.counts[i]}});
    }
    j["per_trial"] = std::move(rows);
  }
  return j;
}

Json to_json(const RepairExperimentReport& r) {
  return Json{{"L", r.length},
              {"n", r.n},
              {"eps", r.eps},
              {"seed", r.seed},
              {"p0_before", r.p0_before},
              {"p1_before", r.p1_before},
              {"p0_repaired", r.p0_repaired},
              {"p1_repaired", r.p1_repaired},
              {"p0_after", r.p0_after},
              {"p1_after", r.p1_after},
              {"donors", r.donors},
              {"defects", r.defects},
              {"donor_defect_ratio", r.defects == 0 ? Json(nullptr) : Json(r.donor_defect_ratio)},
              {"insufficient_donors", r.insufficient_donors},
              {"residual_defects", r.residual_defects},
              {"atoms_lost", r.repair.atoms_lost},
              {"repair", to_json(r.repair)},
              {"yield_before", r.yield_before},
              {"yield_after", r.yield_after}};
}

Json to_json(const GateMacro& macro) {
  return std::visit(
      Overloaded{
          [](const ControlPhasePi& g) { return Json{{"op", "cz"}, {"q1", g.q1}, {"q2", g.q2}}; },
          [](const PhaseGate& g) { return Json{{"op", "phase"}, {"q", g.q}, {"phi", g.phi}}; },
          [](const HadamardLike& g) { return Json{{"op", "h"}, {"q", g.q}}; },
          [](const MeasureQubit& g) {
            return Json{{"op", "measure"}, {"q", g.q}, {"rest", g.rest}, {"up", g.count_up_too}};
          },
      },
      macro);
}

GateMacro macro_from_json(const Json& j) {
  const Json& op = field(j, "op");
  if (!op.is_string()) throw FormatError("'op' must be a string");
  const auto name = op.get<std::string>();
  if (name == "cz") return ControlPhasePi{int_field(j, "q1"), int_field(j, "q2")};
  if (name == "phase") return PhaseGate{int_field(j, "q"), number_field(j, "phi")};
  if (name == "h") return HadamardLike{int_field(j, "q")};
  if (name == "measure") {
    MeasureQubit m{int_field(j, "q"), 0, false};
    if (j.contains("rest")) m.rest = int_field(j, "rest");
    if (j.contains("up")) {
      if (!j.at("up").is_boolean()) throw FormatError("'up' must be a boolean");
      m.count_up_too = j.at("up").get<bool>();
    }
    return m;
  }
  throw FormatError("unknown macro '" + name + "'");
}

std::vector<GateMacro> macros_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("macro list must be an array");
  std::vector<GateMacro> out;
  for (const auto& m : j) out.push_back(macro_from_json(m));
  return out;
}

Json to_json(const LogicalUnitary& u) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < u.matrix.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < u.matrix.cols(); ++c) {
      row.push_back({{"re", u.matrix(r, c).real()}, {"im", u.matrix(r, c).imag()}});
    }
    rows.push_back(std::move(row));
  }
  return Json{{"qubits", u.qubits}, {"leakage", u.leakage}, {"matrix", std::move(rows)}};
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("JSON parse error: ") + e.what());
  }
}

}  // namespace eqc
