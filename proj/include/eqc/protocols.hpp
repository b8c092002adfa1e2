#pragma once

// Composite procedures built from the primitive set: depopulation, the
// pointer/format protocol that carves isolated n-qubit computers out of a
// random filling, defect repair, and defect creation. The oracle functions
// predict protocol outcomes directly from the initial filling.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "eqc/lattice.hpp"
#include "eqc/primitives.hpp"
#include "eqc/random.hpp"
#include "eqc/script.hpp"

namespace eqc {

/// One formatted computer: `n` single-atom qubit sites immediately left of
/// the pointer's home site. qubit_sites[j-1] is the site at offset j.
struct ComputerDescriptor {
  std::size_t home = 0;
  int n = 0;
  std::vector<std::size_t> qubit_sites;

  friend bool operator==(const ComputerDescriptor&,
                         const ComputerDescriptor&) = default;
};

class StrayAtomsError : public std::runtime_error {
 public:
  explicit StrayAtomsError(std::vector<std::size_t> sites);
  const std::vector<std::size_t>& sites() const { return sites_; }

 private:
  std::vector<std::size_t> sites_;
};

/// For x = target+1..cutoff: U_{x,0}^{target,x-target} then E_p. Maps every
/// site |x,0,0> with x > target down to |target,0,0>.
ProtocolScript depopulate_script(int cutoff, int target);

/// Converts 1-atom sites into pointers, keeps those with n two-atom sites
/// to their left, thins the reserved sites to one atom, and empties the
/// rest of the lattice.
ProtocolScript format_script(int n);

/// Homes k with a_k = 1 and a_{k-j} = 2 for j = 1..n (cyclic). Input must be
/// classical with all atoms in level a and every count <= 2.
std::vector<ComputerDescriptor> oracle_computers(const BasisConfig& initial, int n);

/// Finds every n x (1,0,0) + (1,0,1) pattern. Throws StrayAtomsError when
/// an occupied site belongs to no computer.
std::vector<ComputerDescriptor> verify_formatted(const BasisConfig& config, int n);
std::vector<ComputerDescriptor> verify_formatted(const MixedState& state, int n);

/// Builds a lattice of length L holding formatted computers at `homes`,
/// every qubit in |down>.
BasisConfig formatted_lattice(std::size_t length, const std::vector<std::size_t>& homes,
                              int n);

// ------------------------------------------------------------------ repair

enum class RepairPhase { FillEmpty, FillSingle };

/// One lend-and-return round with pointer-level shift x.
ProtocolScript repair_round_script(int x, RepairPhase phase);

struct RepairSchedule {
  enum class Kind { Exhaustive, Random };
  Kind kind = Kind::Exhaustive;
  std::uint64_t seed = 0;
  int rounds = 0;  ///< per phase, random schedule only

  static RepairSchedule exhaustive() { return {}; }
  static RepairSchedule random(std::uint64_t seed, int rounds) {
    return {Kind::Random, seed, rounds};
  }
};

struct RepairReport {
  long defects_fixed = 0;
  long atoms_lost = 0;
  long rounds = 0;
  long empty_fixed = 0;
  long single_fixed = 0;
  std::size_t residual_empty = 0;
  std::size_t residual_single = 0;
  std::size_t donors_remaining = 0;
};

struct RepairOutcome {
  BasisConfig config;
  RepairReport report;
};

/// Runs fill-empty rounds, then fill-single rounds, over the schedule's
/// shifts; each phase stops early once no defect or no 4-atom donor is
/// left. Input: classical, all atoms in level a, counts <= 4.
RepairOutcome repair(const BasisConfig& config,
                     const RepairSchedule& schedule = RepairSchedule::exhaustive(),
                     const Limits& limits = {});

// -------------------------------------------------------- defect creation

/// depopulate to two, DefectSplit(eps), E_b.
ProtocolScript create_defects_script(double eps, int cutoff = 4);

/// Draws one classical branch of create_defects_script: after
/// depopulation each |2,0,0> site independently becomes |1,0,0> with
/// probability eps.
BasisConfig sample_defects(const BasisConfig& config, double eps, Rng& rng,
                           int cutoff = 4, const Limits& limits = {});

}  // namespace eqc
