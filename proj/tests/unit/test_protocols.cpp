#include <catch_amalgamated.hpp>

#include <cmath>

#include "eqc/protocols.hpp"
#include "support/oracles.hpp"

using namespace eqc;

namespace {

BasisConfig run(const BasisConfig& cfg, const ProtocolScript& s) { return run_classical(cfg, s).config; }

std::vector<std::size_t> homes_of(const std::vector<ComputerDescriptor>& ds) {
  std::vector<std::size_t> homes;
  for (const auto& d : ds) homes.push_back(d.home);
  return homes;
}

}  // namespace

TEST_CASE("depopulation") {
  const ProtocolScript depop = depopulate_script(6, 2);
  CHECK(run(BasisConfig::from_a_counts({5}), depop) == BasisConfig::from_a_counts({2}));
  CHECK(run(BasisConfig::from_a_counts({2}), depop) == BasisConfig::from_a_counts({2}));

  Rng rng(11);
  for (int t = 0; t < 10000; ++t) {
    std::vector<int> a(1 + uniform_below(rng, 12));
    for (auto& x : a) x = int(uniform_below(rng, 7));
    const int target = uniform_below(rng, 2) ? 2 : 4;
    std::vector<int> expected(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) expected[k] = std::min(a[k], target);
    REQUIRE(run(BasisConfig::from_a_counts(std::span<const int>(a)), depopulate_script(6, target)) ==
            BasisConfig::from_a_counts(std::span<const int>(expected)));
  }
}

TEST_CASE("format protocol on small examples") {
  CHECK(run(BasisConfig::from_a_counts({2, 1}), format_script(1)) == BasisConfig{{1, 0, 0}, {1, 0, 1}});
  CHECK(run(BasisConfig::from_a_counts({0, 1, 0}), format_script(1)) == BasisConfig(3));
  CHECK(run(BasisConfig(6), format_script(3)) == BasisConfig(6));

  // Step repetition counts follow n.
  CHECK(format_script(1).size() == 1 + 4 + 1 + 0 + 4);
  CHECK(format_script(4).size() == 1 + 16 + 1 + 12 + 4);
  CHECK(format_script(3).is_basis_preserving());
}

TEST_CASE("window oracle") {
  CHECK(homes_of(oracle_computers(BasisConfig::from_a_counts({2, 2, 1}), 2)) == std::vector<std::size_t>{2});
  CHECK(oracle_computers(BasisConfig::from_a_counts({1, 1}), 1).empty());
  CHECK(homes_of(oracle_computers(BasisConfig::from_a_counts({2, 2, 2, 1, 2, 2, 1}), 2)) ==
        std::vector<std::size_t>{3, 6});
  const auto d = oracle_computers(BasisConfig::from_a_counts({2, 0, 2, 1}), 1);
  REQUIRE(d.size() == 1);
  CHECK(d[0].qubit_sites == std::vector<std::size_t>{2});
  CHECK_THROWS_AS(oracle_computers(BasisConfig::from_a_counts({3, 1}), 1), std::invalid_argument);

  for (const auto& a : {std::vector<int>{1, 1}, std::vector<int>{2, 2, 2, 1, 2, 2, 1}}) {
    const BasisConfig cfg = BasisConfig::from_a_counts(std::span<const int>(a));
    for (int n = 1; n <= 3; ++n) {
      CHECK(homes_of(oracle_computers(cfg, n)) == oracle::window_homes(a, n));
      CHECK(run(cfg, format_script(n)) == oracle::formatted_pattern(a.size(), oracle::window_homes(a, n), n));
    }
  }
}

TEST_CASE("formatted lattices verify") {
  const auto one = verify_formatted(BasisConfig{{1, 0, 0}, {1, 0, 1}}, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].home == 1);
  CHECK(verify_formatted(BasisConfig(5), 2).empty());
  CHECK_THROWS_AS(verify_formatted(BasisConfig{{1, 0, 0}, {0, 0, 0}, {1, 0, 1}}, 1), StrayAtomsError);
  CHECK_THROWS_AS(verify_formatted(BasisConfig{{2, 0, 0}, {1, 0, 1}}, 1), StrayAtomsError);

  const BasisConfig built = formatted_lattice(12, {3, 8}, 3);
  CHECK(homes_of(verify_formatted(built, 3)) == std::vector<std::size_t>{3, 8});

  Rng rng(12);
  for (int t = 0; t < 500; ++t) {
    std::vector<int> a(32);
    for (auto& x : a) x = int(uniform_below(rng, 3));
    const int n = 1 + int(uniform_below(rng, 4));
    const BasisConfig cfg = BasisConfig::from_a_counts(std::span<const int>(a));
    REQUIRE(verify_formatted(run(cfg, format_script(n)), n) == oracle_computers(cfg, n));
  }
}

TEST_CASE("repair rounds") {
  // Donor at k lends to k + x under the right-shift convention.
  const BasisConfig donor_empty = BasisConfig::from_a_counts({4, 0, 2});
  CHECK(run(donor_empty, repair_round_script(1, RepairPhase::FillEmpty)) ==
        BasisConfig::from_a_counts({2, 1, 2}));
  CHECK(run(BasisConfig::from_a_counts({4, 2, 1}), repair_round_script(2, RepairPhase::FillSingle)) ==
        BasisConfig::from_a_counts({2, 2, 2}));
  CHECK(run(BasisConfig::from_a_counts({4, 2, 2}), repair_round_script(1, RepairPhase::FillEmpty)) ==
        BasisConfig::from_a_counts({4, 2, 2}));
  CHECK(run(BasisConfig::from_a_counts({4, 0, 4, 0}), repair_round_script(1, RepairPhase::FillEmpty)) ==
        BasisConfig::from_a_counts({2, 1, 2, 1}));
}

TEST_CASE("repair") {
  // An empty site needs two donors (it passes through the 1-atom state), so
  // two donors cannot clear one empty and one single site.
  const RepairOutcome short_out = repair(BasisConfig::from_a_counts({4, 0, 4, 1}));
  CHECK(short_out.config == BasisConfig::from_a_counts({2, 1, 2, 2}));
  CHECK(short_out.report.atoms_lost == 2);
  CHECK(short_out.report.defects_fixed == 2);
  CHECK(short_out.report.residual_single == 1);

  const RepairOutcome out = repair(BasisConfig::from_a_counts({4, 0, 4, 1, 4}));
  CHECK(out.config == BasisConfig::from_a_counts({2, 2, 2, 2, 2}));
  CHECK(out.report.atoms_lost == 3);
  CHECK(out.report.defects_fixed == 3);
  CHECK(out.report.empty_fixed == 1);
  CHECK(out.report.single_fixed == 2);

  const BasisConfig starved = BasisConfig::from_a_counts({2, 0, 2});
  const RepairOutcome none = repair(starved);
  CHECK(none.config == starved);
  CHECK(none.report.defects_fixed == 0);
  CHECK(none.report.residual_empty == 1);

  const BasisConfig lone = BasisConfig::from_a_counts({4, 0, 0});
  const RepairOutcome partial = repair(lone);
  CHECK(partial.report.atoms_lost == lone.total_atoms() - partial.config.total_atoms());
  CHECK(partial.report.donors_remaining == 0);

  Rng rng(13);
  for (int t = 0; t < 50; ++t) {
    const std::size_t length = 10000;
    std::vector<int> a(length);
    for (auto& x : a) {
      const double u = uniform01(rng);
      x = u < 0.05 ? 0 : u < 0.1 ? 1 : u < 0.6 ? 2 : 4;
    }
    const BasisConfig cfg = BasisConfig::from_a_counts(std::span<const int>(a));
    const RepairOutcome r = repair(cfg);
    CHECK(r.config.count_sites({0, 0, 0}) == 0);
    CHECK(r.report.atoms_lost == cfg.total_atoms() - r.config.total_atoms());
  }

  const RepairOutcome randomized = repair(BasisConfig::from_a_counts({4, 0, 4, 1, 2, 2}), RepairSchedule::random(3, 40));
  CHECK(randomized.report.rounds <= 80);
  CHECK(randomized.report.atoms_lost == randomized.report.defects_fixed);
}

TEST_CASE("defect creation") {
  const BasisConfig twos = BasisConfig::from_a_counts({2, 2, 2, 2});
  CHECK(apply(classical(twos), create_defects_script(0.0)).state.classical_config() == twos);
  CHECK(apply(classical(twos), create_defects_script(1.0)).state.classical_config() ==
        BasisConfig::from_a_counts({1, 1, 1, 1}));

  // The sampled branch statistics match the exact channel on two sites.
  const BasisConfig pair = BasisConfig::from_a_counts({2, 3});
  const MixedState exact = apply(classical(pair), create_defects_script(0.3)).state;
  REQUIRE(exact.branches().size() == 4);
  Rng rng(14);
  std::map<BasisConfig, int> hist;
  const int runs = 20000;
  for (int r = 0; r < runs; ++r) ++hist[sample_defects(pair, 0.3, rng)];
  for (const auto& br : exact.branches()) {
    const double f = double(hist[br.state.terms().begin()->first]) / runs;
    CHECK(std::abs(f - br.weight) <= 4 * std::sqrt(br.weight * (1 - br.weight) / runs));
  }

  const std::size_t length = 100000;
  const double eps = 1.0 / 8;
  const BasisConfig big = sample_defects(BasisConfig(std::vector<SiteOccupancy>(length, {2, 0, 0})), eps, rng);
  const double ones = double(big.count_sites({1, 0, 0}));
  CHECK(std::abs(ones - length * eps) <= 3 * std::sqrt(length * eps * (1 - eps)));
}
