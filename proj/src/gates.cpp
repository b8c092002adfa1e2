#include "eqc/gates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace eqc {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_offset(int q, int n, const char* name) {
  if (q < 1 || q > n) {
    throw std::invalid_argument(std::string(name) + " offset " + std::to_string(q) +
                                " outside 1.." + std::to_string(n));
  }
}

int resting_offset(const MeasureQubit& m, int n) { return m.rest == 0 ? n : m.rest; }

// Pointer moves from offset `from` to offset `to`; offsets grow leftwards.
void move(ProtocolScript& script, int from, int to) {
  if (from != to) script.push(Shift{from - to});
}

std::size_t site_left(std::size_t home, int offset, std::size_t length) {
  return (home + length - static_cast<std::size_t>(offset) % length) % length;
}

void append_measure_round(ProtocolScript& s, int q, int rest) {
  s.push(transfer(1, 1, 0, 2));
  move(s, q, rest);
  s.push(transfer(1, 1, 2, 0))
      .push(transfer(1, 2, 2, 1))
      .push(CountP{})
      .push(EmptyP{})
      .push(transfer(2, 0, 1, 1));
}

void check_measurable(const MixedState& state, int q, int rest) {
  for (const auto& br : state.branches()) {
    for (const auto& [cfg, amp] : br.state.terms()) {
      const std::size_t length = cfg.size();
      for (std::size_t k = 0; k < length; ++k) {
        if (cfg[k].p == 0) continue;
        if (cfg[k] != kHome) {
          throw MalformedComputer("pointer at site " + std::to_string(k) +
                                  " is not parked at home: " + to_string(cfg[k]));
        }
        const auto& target = cfg[site_left(k, q, length)];
        const auto& resting = cfg[site_left(k, rest, length)];
        if (target != kDown && target != kUp) {
          throw MalformedComputer("target qubit of home " + std::to_string(k) +
                                  " holds " + to_string(target));
        }
        if (resting != kDown) {
          throw MalformedComputer("resting qubit of home " + std::to_string(k) +
                                  " must be |down>, holds " + to_string(resting));
        }
      }
    }
  }
}

}  // namespace

std::vector<int> involved_qubits(const GateMacro& macro, int n) {
  return std::visit(
      Overloaded{
          [](const ControlPhasePi& g) { return std::vector<int>{g.q1, g.q2}; },
          [](const PhaseGate& g) { return std::vector<int>{g.q}; },
          [](const HadamardLike& g) { return std::vector<int>{g.q}; },
          [n](const MeasureQubit& g) {
            return std::vector<int>{g.q, resting_offset(g, n)};
          },
      },
      macro);
}

CompiledMacro compile(const GateMacro& macro, PointerFrame frame, int n) {
  if (n < 1) throw std::invalid_argument("computer size n must be >= 1");
  if (frame.offset < 0 || frame.offset > n) {
    throw std::invalid_argument("pointer frame outside the computer");
  }
  ProtocolScript s;
  const int start = frame.offset;
  std::visit(
      Overloaded{
          [&](const ControlPhasePi& g) {
            check_offset(g.q1, n, "control");
            check_offset(g.q2, n, "target");
            if (g.q1 == g.q2) throw std::invalid_argument("control-pi needs two qubits");
            move(s, start, g.q1);
            s.push(transfer(1, 1, 2, 0));
            move(s, g.q1, g.q2);
            s.push(Collide{std::numbers::pi});
            move(s, g.q2, g.q1);
            s.push(transfer(1, 1, 2, 0));
            move(s, g.q1, 0);
          },
          [&](const PhaseGate& g) {
            check_offset(g.q, n, "qubit");
            move(s, start, g.q);
            s.push(Collide{g.phi});
            move(s, g.q, 0);
          },
          [&](const HadamardLike& g) {
            check_offset(g.q, n, "qubit");
            move(s, start, g.q);
            s.push(ABRotation{kHadamardRotation})
                .push(Collide{std::numbers::pi})
                .push(ABRotation{-kHadamardRotation})
                .push(Collide{std::numbers::pi / 2});
            move(s, g.q, 0);
          },
          [&](const MeasureQubit& g) {
            const int rest = resting_offset(g, n);
            check_offset(g.q, n, "qubit");
            check_offset(rest, n, "resting");
            if (rest == g.q) throw std::invalid_argument("resting site must differ from target");
            move(s, start, g.q);
            append_measure_round(s, g.q, rest);
            if (g.count_up_too) {
              move(s, rest, g.q);
              s.push(WSwap{});
              append_measure_round(s, g.q, rest);
            }
            move(s, rest, 0);
          },
      },
      macro);
  return CompiledMacro{std::move(s), PointerFrame{0}};
}

BasisConfig logical_config(std::size_t length, std::size_t home,
                           const std::vector<bool>& up) {
  if (home >= length || up.size() + 1 > length) {
    throw std::invalid_argument("computer does not fit in lattice");
  }
  BasisConfig config(length);
  config[home] = kHome;
  for (std::size_t j = 1; j <= up.size(); ++j) {
    config[site_left(home, static_cast<int>(j), length)] = up[j - 1] ? kUp : kDown;
  }
  return config;
}

LogicalUnitary extract_logical_unitary(const GateMacro& macro, int n,
                                       std::vector<int> qubits, std::size_t length) {
  if (std::holds_alternative<MeasureQubit>(macro)) {
    throw std::invalid_argument("measurement has no logical unitary");
  }
  if (qubits.empty()) qubits = involved_qubits(macro, n);
  for (int q : qubits) check_offset(q, n, "qubit");
  if (length == 0) length = static_cast<std::size_t>(n) + 3;
  if (length < static_cast<std::size_t>(n) + 3) {
    throw std::invalid_argument("lattice needs an empty padding site on each side");
  }
  const std::size_t home = static_cast<std::size_t>(n) + 1;
  const ProtocolScript script = compile(macro, PointerFrame{}, n).script;

  const std::size_t k = qubits.size();
  const std::size_t dim = std::size_t{1} << k;
  auto basis_string = [&](std::size_t index) {
    std::vector<bool> up(static_cast<std::size_t>(n), false);
    for (std::size_t i = 0; i < k; ++i) {
      if ((index >> i) & 1U) up[static_cast<std::size_t>(qubits[i] - 1)] = true;
    }
    return logical_config(length, home, up);
  };

  LogicalUnitary result{qubits, Eigen::MatrixXcd::Zero(dim, dim), 0.0};
  for (std::size_t in = 0; in < dim; ++in) {
    ExecutionResult run = apply(classical(basis_string(in)), script);
    const PureState& out = run.state.pure();
    double kept = 0.0;
    for (std::size_t o = 0; o < dim; ++o) {
      const Amplitude amp = out.amplitude(basis_string(o));
      result.matrix(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(in)) = amp;
      kept += std::norm(amp);
    }
    result.leakage = std::max(result.leakage, std::max(0.0, 1.0 - kept));
  }
  if (result.leakage > kLeakageLimit) {
    throw GateFailure("macro leaks out of the logical subspace: leakage " +
                      std::to_string(result.leakage));
  }
  return result;
}

MeasurementOutcome measure_qubit(const MixedState& state, const MeasureQubit& macro,
                                 int n, Rng& rng, const Limits& limits) {
  const int rest = resting_offset(macro, n);
  const ProtocolScript script = compile(macro, PointerFrame{}, n).script;
  check_measurable(state, macro.q, rest);
  ApplyOptions options;
  options.limits = limits;
  options.count_mode = CountMode::Sample;
  options.rng = &rng;
  ExecutionResult run = apply(state, script, options);
  MeasurementOutcome outcome{std::lround(run.counts.at(0)), std::nullopt,
                             std::move(run.state)};
  if (macro.count_up_too) outcome.up_count = std::lround(run.counts.at(1));
  return outcome;
}

ExecutionResult run_circuit(const MixedState& state, const std::vector<GateMacro>& macros,
                            int n, const ApplyOptions& options) {
  ExecutionResult result{state, {}, false};
  PointerFrame frame;
  for (const auto& macro : macros) {
    CompiledMacro compiled = compile(macro, frame, n);
    ExecutionResult step = apply(result.state, compiled.script, options);
    result.state = std::move(step.state);
    result.counts.insert(result.counts.end(), step.counts.begin(), step.counts.end());
    frame = compiled.frame;
  }
  return result;
}

double unitarity_error(const Eigen::MatrixXcd& u) {
  const Eigen::MatrixXcd d =
      u.adjoint() * u - Eigen::MatrixXcd::Identity(u.cols(), u.cols());
  return d.cwiseAbs().maxCoeff();
}

HadamardCorrection hadamard_correction(const Eigen::MatrixXcd& u) {
  if (u.rows() != 2 || u.cols() != 2) {
    throw std::invalid_argument("Hadamard check needs a 2x2 matrix");
  }
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd h;
  h << r, r, r, -r;
  auto phase_of = [](Amplitude z) {
    const double m = std::abs(z);
    return m > 0.0 ? z / m : Amplitude{1.0};
  };
  HadamardCorrection c;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      c.bias_error = std::max(c.bias_error, std::abs(std::norm(u(i, j)) - 0.5));
    }
  }
  // Fix right(0) = 1; rows from column 0, then right(1) from entry (0,1).
  c.right(0) = 1.0;
  c.left(0) = phase_of(h(0, 0) / u(0, 0));
  c.left(1) = phase_of(h(1, 0) / u(1, 0));
  c.right(1) = phase_of(h(0, 1) / (c.left(0) * u(0, 1)));
  const Eigen::Matrix2cd corrected =
      c.left.asDiagonal() * u.topLeftCorner<2, 2>() * c.right.asDiagonal();
  c.residual = (corrected - h).cwiseAbs().maxCoeff();
  return c;
}

ControlledPhaseSummary analyze_controlled_phase(const Eigen::MatrixXcd& u,
                                                double tolerance) {
  if (u.rows() != 4 || u.cols() != 4) {
    throw std::invalid_argument("controlled-phase check needs a 4x4 matrix");
  }
  ControlledPhaseSummary s;
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      if (i != j) s.off_diagonal = std::max(s.off_diagonal, std::abs(u(i, j)));
    }
    if (std::abs(u(i, i) + 1.0) <= tolerance) {
      ++s.minus_ones;
      s.phase_index = static_cast<std::size_t>(i);
    }
    if (std::abs(u(i, i) - 1.0) <= tolerance) ++s.plus_ones;
  }
  s.entangling_gap = std::abs(u(0, 0) * u(3, 3) - u(1, 1) * u(2, 2));
  return s;
}

}  // namespace eqc
