#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "eqc/gates.hpp"
#include "eqc/protocols.hpp"
#include "support/oracles.hpp"

using namespace eqc;

TEST_CASE("macro compilation") {
  const double phi = 0.4;
  CHECK(compile(PhaseGate{2, phi}, {}, 3).script == ProtocolScript{Shift{-2}, Collide{phi}, Shift{2}});
  CHECK(compile(HadamardLike{1}, {}, 3).script ==
        ProtocolScript{Shift{-1}, ABRotation{std::numbers::pi / 8}, Collide{std::numbers::pi},
                       ABRotation{-std::numbers::pi / 8}, Collide{std::numbers::pi / 2}, Shift{1}});
  CHECK(compile(ControlPhasePi{1, 3}, {}, 3).script ==
        ProtocolScript{Shift{-1}, transfer(1, 1, 2, 0), Shift{-2}, Collide{std::numbers::pi},
                       Shift{2}, transfer(1, 1, 2, 0), Shift{1}});
  // Starting from a displaced frame only changes the first move.
  CHECK(compile(PhaseGate{2, phi}, PointerFrame{3}, 3).script == ProtocolScript{Shift{1}, Collide{phi}, Shift{2}});

  CHECK_THROWS_AS(compile(PhaseGate{4, phi}, {}, 3), std::invalid_argument);
  CHECK_THROWS_AS(compile(ControlPhasePi{2, 2}, {}, 3), std::invalid_argument);
  CHECK_THROWS_AS(compile(MeasureQubit{3}, {}, 3), std::invalid_argument);
}

TEST_CASE("logical matrices") {
  const LogicalUnitary id = extract_logical_unitary(PhaseGate{2, 0.0}, 3);
  CHECK((id.matrix - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(id.leakage == 0.0);

  const LogicalUnitary cz = extract_logical_unitary(ControlPhasePi{1, 2}, 3);
  const ControlledPhaseSummary s = analyze_controlled_phase(cz.matrix, 1e-10);
  CHECK(s.off_diagonal < 1e-12);
  CHECK(s.minus_ones == 1);
  CHECK(s.plus_ones == 3);
  // The -1 sits on (q1 up, q2 down): index bit 0 is q1.
  CHECK(s.phase_index == 1);
  CHECK(s.entangling_gap == Catch::Approx(2.0));

  const LogicalUnitary h = extract_logical_unitary(HadamardLike{2}, 3);
  const HadamardCorrection corr = hadamard_correction(h.matrix);
  CHECK(corr.bias_error < 1e-10);
  CHECK(corr.residual < 1e-10);
  CHECK(unitarity_error(h.matrix) < 1e-12);

  // A truncated rotation is not unbiased.
  const LogicalUnitary not_h = extract_logical_unitary(PhaseGate{1, 1.0}, 3);
  CHECK(hadamard_correction(not_h.matrix).bias_error > 0.4);
  CHECK_THROWS_AS(extract_logical_unitary(MeasureQubit{1}, 3), std::invalid_argument);
  CHECK_THROWS_AS(extract_logical_unitary(PhaseGate{1, 1.0}, 3, {}, 4), std::invalid_argument);
}

TEST_CASE("circuits") {
  const int n = 3;
  const std::size_t length = 12, home = n + 1;
  CHECK(strictly_equal(run_circuit(classical(logical_config(length, home, {true, false, true})), {}, n).state,
                       classical(logical_config(length, home, {true, false, true}))));

  // H-like twice equals the square of its matrix.
  const Eigen::MatrixXcd u = extract_logical_unitary(HadamardLike{1}, n).matrix;
  const Eigen::MatrixXcd u2 = u * u;
  for (int in = 0; in < 2; ++in) {
    const BasisConfig start = logical_config(length, home, {in == 1, false, false});
    const PureState out = run_circuit(classical(start), {HadamardLike{1}, HadamardLike{1}}, n).state.pure();
    for (int o = 0; o < 2; ++o) {
      CHECK(std::abs(out.amplitude(logical_config(length, home, {o == 1, false, false})) - u2(o, in)) < 1e-12);
    }
  }

  // Two computers evolve in lockstep.
  BasisConfig two(12);
  for (std::size_t h0 : {3u, 9u}) {
    two[h0] = kHome;
    for (int j = 1; j <= n; ++j) two[h0 - j] = kDown;
  }
  const PureState out = run_circuit(classical(two), {HadamardLike{1}}, n).state.pure();
  CHECK(out.size() == 4);
  for (const auto& [cfg, amp] : out.terms()) {
    const int o1 = cfg[2] == kUp, o2 = cfg[8] == kUp;
    CHECK(std::abs(amp - u(o1, 0) * u(o2, 0)) < 1e-12);
  }
}

TEST_CASE("measurement") {
  const int n = 3;
  const std::vector<std::size_t> homes{3, 8, 13};
  BasisConfig cfg = formatted_lattice(15, homes, n);
  cfg[homes[1] - 1] = kUp;  // target qubits down, up, down
  Rng rng(21);
  const MeasurementOutcome m = measure_qubit(classical(cfg), MeasureQubit{1, 0, true}, n, rng);
  CHECK(m.down_count == 2);
  REQUIRE(m.up_count.has_value());
  CHECK(*m.up_count == 1);
  for (std::size_t h : homes) {
    CHECK(m.state.classical_config()[h] == kHome);
    CHECK(m.state.classical_config()[h - 3] == kDown);
  }

  // Without the continuation only the qubits found down are emptied.
  const MeasurementOutcome down_only = measure_qubit(classical(cfg), MeasureQubit{1}, n, rng);
  CHECK(down_only.down_count == 2);
  CHECK_FALSE(down_only.up_count.has_value());
  CHECK(down_only.state.classical_config()[homes[0] - 1].empty());
  CHECK(down_only.state.classical_config()[homes[1] - 1] == kUp);
  CHECK(down_only.state.classical_config()[homes[2] - 1].empty());

  BasisConfig ups = formatted_lattice(10, {3, 8}, n);
  for (std::size_t h : {3u, 8u}) ups[h - 1] = kUp;
  const MeasurementOutcome all_up = measure_qubit(classical(ups), MeasureQubit{1}, n, rng);
  CHECK(all_up.down_count == 0);
  CHECK(all_up.state.classical_config() == ups);

  BasisConfig bad = formatted_lattice(10, {3, 8}, n);
  bad[0] = kUp;  // resting qubit of the first computer
  CHECK_THROWS_AS(measure_qubit(classical(bad), MeasureQubit{1}, n, rng), MalformedComputer);

  // Superposed qubit: Born statistics over sampled runs.
  const std::size_t length = 6, home = 4;
  const MixedState plus = run_circuit(classical(logical_config(length, home, {false, false, false})),
                                      {HadamardLike{1}}, n).state;
  const int runs = 10000;
  long downs = 0;
  for (int r = 0; r < runs; ++r) downs += measure_qubit(plus, MeasureQubit{1}, n, rng).down_count;
  CHECK(std::abs(double(downs) / runs - 0.5) <= 3 * std::sqrt(0.25 / runs));
}
