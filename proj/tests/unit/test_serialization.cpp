#include <catch_amalgamated.hpp>

#include "eqc/serialization.hpp"
#include "support/oracles.hpp"

using namespace eqc;

TEST_CASE("configurations round trip") {
  const BasisConfig cfg{{1, 0, 0}, {2, 1, 3}};
  const Json j = to_json(cfg);
  CHECK(j.dump() == "[[1,0,0],[2,1,3]]");
  CHECK(config_from_json(j) == cfg);
  CHECK_THROWS_AS(config_from_json(Json::parse("[[1,0]]")), FormatError);
  CHECK_THROWS_AS(config_from_json(Json::parse("[[1,0,-1]]")), FormatError);
  CHECK_THROWS_AS(config_from_json(Json::parse("[]")), FormatError);
  CHECK_THROWS_AS(config_from_json(Json::parse("[[1.5,0,0]]")), FormatError);
}

TEST_CASE("states round trip") {
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const PureState a = oracle::random_state(rng, 3, 4, 2, 2, 2);
    const PureState b = oracle::random_state(rng, 3, 2, 2, 2, 2);
    const MixedState rho = MixedState::from_branches({{0.3, a}, {0.7, b}});
    const MixedState back = state_from_json(parse_json(to_json(rho).dump()));
    CHECK(strictly_equal(rho, back));
  }
  CHECK(lattice_from_json(Json::parse("[[2,0,0],[1,0,0]]")).classical_config() == BasisConfig::from_a_counts({2, 1}));
  CHECK_THROWS_AS(lattice_from_json(Json::parse("[[7,0,0]]")), OverflowError);
  CHECK_THROWS_AS(state_from_json(Json::parse(R"({"branches":[]})")), FormatError);
  CHECK_THROWS_AS(state_from_json(Json::parse(R"({"branches":[{"weight":1,"terms":[]}]})")), FormatError);
  CHECK_THROWS_AS(parse_json("{not json"), FormatError);
}

TEST_CASE("macros round trip") {
  const std::vector<GateMacro> macros{ControlPhasePi{1, 3}, PhaseGate{2, 0.25}, HadamardLike{1},
                                      MeasureQubit{1, 3, true}};
  Json arr = Json::array();
  for (const auto& m : macros) arr.push_back(to_json(m));
  CHECK(macros_from_json(arr) == macros);
  CHECK(macro_from_json(Json::parse(R"({"op":"measure","q":2})")) == GateMacro{MeasureQubit{2, 0, false}});
  CHECK_THROWS_AS(macro_from_json(Json::parse(R"({"op":"swap"})")), FormatError);
  CHECK_THROWS_AS(macro_from_json(Json::parse(R"({"op":"h"})")), FormatError);
}

TEST_CASE("reports serialize") {
  RepairReport rr;
  rr.defects_fixed = 3;
  rr.atoms_lost = 3;
  const Json j = to_json(rr);
  CHECK(j["atoms_lost"] == 3);
  const YieldReport y = summarize({7, 8}, {1.0, 3.0}, 2.0);
  CHECK(to_json(y, true)["per_trial"].size() == 2);
  CHECK_FALSE(to_json(y, false).contains("per_trial"));
  const ComputerDescriptor d{4, 2, {3, 2}};
  CHECK(to_json(d).dump() == R"({"home":4,"n":2,"qubit_sites":[3,2]})");
}
