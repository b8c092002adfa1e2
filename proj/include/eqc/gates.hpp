#pragma once

// Pointer-based gate and measurement macros. Qubits are addressed by their
// offset from the pointer's home site (offset j = j sites to the left).
// Moving the pointer is a global p-level shift, so every formatted
// computer in the lattice executes the same gate in lockstep.

#include <numbers>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "eqc/lattice.hpp"
#include "eqc/primitives.hpp"
#include "eqc/script.hpp"

namespace eqc {

inline constexpr double kHadamardRotation = std::numbers::pi / 8;
inline constexpr double kLeakageLimit = 1e-6;

/// |down> = (1,0,0), |up> = (0,1,0); the home site holds (1,0,1).
inline constexpr SiteOccupancy kDown{1, 0, 0};
inline constexpr SiteOccupancy kUp{0, 1, 0};
inline constexpr SiteOccupancy kHome{1, 0, 1};

struct ControlPhasePi {
  int q1 = 1;
  int q2 = 2;
  friend bool operator==(const ControlPhasePi&, const ControlPhasePi&) = default;
};

struct PhaseGate {
  int q = 1;
  double phi = 0.0;
  friend bool operator==(const PhaseGate&, const PhaseGate&) = default;
};

struct HadamardLike {
  int q = 1;
  friend bool operator==(const HadamardLike&, const HadamardLike&) = default;
};

struct MeasureQubit {
  int q = 1;
  int rest = 0;  ///< 0 selects the default resting site, offset n
  bool count_up_too = false;
  friend bool operator==(const MeasureQubit&, const MeasureQubit&) = default;
};

using GateMacro = std::variant<ControlPhasePi, PhaseGate, HadamardLike, MeasureQubit>;

/// Offsets this macro reads or writes, in the order used for matrix indices.
std::vector<int> involved_qubits(const GateMacro& macro, int n);

struct PointerFrame {
  int offset = 0;  ///< pointer displacement left of home
};

struct CompiledMacro {
  ProtocolScript script;
  PointerFrame frame;
};

class GateFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws std::invalid_argument on offsets outside 1..n (or a frame outside
/// 0..n). The returned frame is always back at home.
CompiledMacro compile(const GateMacro& macro, PointerFrame frame, int n);

/// Lattice of `length` sites holding one computer with its home at `home`;
/// qubit j (offset j) is |up> when up[j-1] is set.
BasisConfig logical_config(std::size_t length, std::size_t home,
                           const std::vector<bool>& up);

struct LogicalUnitary {
  std::vector<int> qubits;
  /// Row/column index bit i is the state of qubits[i] (0 = down, 1 = up).
  Eigen::MatrixXcd matrix;
  double leakage = 0.0;
};

/// Simulates the compiled macro on a single computer (home at site n+1 of a
/// lattice of `length` sites, other qubits held in |down>) from every basis
/// string of `qubits`, and projects onto the logical subspace. Throws
/// GateFailure if leakage exceeds kLeakageLimit.
LogicalUnitary extract_logical_unitary(const GateMacro& macro, int n,
                                       std::vector<int> qubits = {},
                                       std::size_t length = 0);

class MalformedComputer : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MeasurementOutcome {
  long down_count = 0;
  std::optional<long> up_count;
  MixedState state;
};

/// Runs the measurement macro with sampled pointer counts. Every pointer
/// must sit at home over |1,0,1> with a |down> resting qubit and a valid
/// target qubit; otherwise MalformedComputer is thrown.
MeasurementOutcome measure_qubit(const MixedState& state, const MeasureQubit& macro,
                                 int n, Rng& rng, const Limits& limits = {});

/// Folds compile + apply over the macros, threading the pointer frame.
ExecutionResult run_circuit(const MixedState& state, const std::vector<GateMacro>& macros,
                            int n, const ApplyOptions& options = {});

// ------------------------------------------------- matrix verification

/// max |(U^dag U - 1)_ij|
double unitarity_error(const Eigen::MatrixXcd& u);

/// Closed-form diagonal phase corrections for a 2x2 unbiased matrix:
/// diag(left) * U * diag(right) approximates the Hadamard matrix.
struct HadamardCorrection {
  Eigen::Vector2cd left;
  Eigen::Vector2cd right;
  double bias_error = 0.0;  ///< max ||u_ij|^2 - 1/2|
  double residual = 0.0;    ///< max |corrected - H| entrywise
};

HadamardCorrection hadamard_correction(const Eigen::MatrixXcd& u);

struct ControlledPhaseSummary {
  double off_diagonal = 0.0;  ///< largest off-diagonal magnitude
  int minus_ones = 0;         ///< diagonal entries within tol of -1
  int plus_ones = 0;          ///< diagonal entries within tol of +1
  /// |d00 d11 - d01 d10|: zero iff the diagonal factorizes into 1-qubit
  /// diagonals.
  double entangling_gap = 0.0;
  std::size_t phase_index = 0;  ///< index of the (last) -1 entry
};

ControlledPhaseSummary analyze_controlled_phase(const Eigen::MatrixXcd& u,
                                                double tolerance);

}  // namespace eqc
