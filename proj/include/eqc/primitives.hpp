#pragma once

// Translation-invariant lattice operations. Every op acts identically on
// all sites; there is no way to address an individual site.

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "eqc/lattice.hpp"
#include "eqc/random.hpp"
#include "eqc/script.hpp"

namespace eqc {

// Unitary primitives on pure states.
PureState pair_transfer(const PureState& psi, const PairTransfer& op,
                        const Limits& limits = {});
PureState w_swap(const PureState& psi);
PureState ab_rotation(const PureState& psi, double theta,
                      const Limits& limits = {});
PureState collide(const PureState& psi, double phi);
/// New p at site k is the old p at site (k - x) mod L.
PureState shift_p(const PureState& psi, int x);
PureState defect_split(const PureState& psi, double eps);

/// Applies any unitary primitive to a pure state.
PureState apply_unitary(const PureState& psi, const PrimitiveOp& op,
                        const Limits& limits = {});

// Mixed-state versions; unitaries act branchwise.
MixedState pair_transfer(const MixedState& rho, const PairTransfer& op,
                         const Limits& limits = {});
MixedState w_swap(const MixedState& rho);
MixedState ab_rotation(const MixedState& rho, double theta,
                       const Limits& limits = {});
MixedState collide(const MixedState& rho, double phi);
MixedState shift_p(const MixedState& rho, int x);
MixedState defect_split(const MixedState& rho, double eps);

/// Trace-out channel removing every atom of `level`. Each branch splits by
/// the occupation pattern of the removed level, weighted by Born
/// probability, and that level is then zeroed.
MixedState empty_level(const MixedState& rho, Level level);
inline MixedState empty_p(const MixedState& rho) {
  return empty_level(rho, Level::P);
}
inline MixedState empty_b(const MixedState& rho) {
  return empty_level(rho, Level::B);
}

enum class CountMode { Sample, Expect };

struct CountOutcome {
  double value = 0.0;
  bool deterministic = true;
  MixedState state;
};

/// Total pointer-level count. Sample mode draws an outcome with Born
/// probability and projects; expect mode returns the expectation and leaves
/// the state alone. No randomness is consumed when the outcome is fixed.
CountOutcome count_p(const MixedState& rho, CountMode mode, Rng* rng = nullptr);

/// exp(-i theta H_ab) restricted to the sector a + b = total, in the basis
/// ordered by the a-count 0..total.
Eigen::MatrixXcd ab_rotation_sector(int total, double theta);

// ------------------------------------------------------------- interpreter

struct ApplyOptions {
  Limits limits;
  CountMode count_mode = CountMode::Expect;
  Rng* rng = nullptr;
  /// Allow the classical fast path when the input is a basis state and the
  /// script is basis-preserving.
  bool fast_path = true;
};

struct ExecutionResult {
  MixedState state;
  /// One entry per CountP, in script order.
  std::vector<double> counts;
  bool used_fast_path = false;
};

MixedState apply_op(const MixedState& rho, const PrimitiveOp& op,
                    const Limits& limits = {});

ExecutionResult apply(const MixedState& rho, const ProtocolScript& script,
                      const ApplyOptions& options = {});

/// In-place classical execution of basis-preserving scripts on a single
/// Fock configuration; `phase` accumulates collisional phases.
struct ClassicalRun {
  BasisConfig config;
  Amplitude phase{1.0};
  std::vector<long> counts;
};

void apply_classical(BasisConfig& config, const PrimitiveOp& op,
                     Amplitude& phase, const Limits& limits = {});

/// Throws std::invalid_argument if the script is not basis-preserving.
ClassicalRun run_classical(BasisConfig config, const ProtocolScript& script,
                           const Limits& limits = {});

}  // namespace eqc
