#pragma once

// Random iid lattice fillings, Monte Carlo yield estimates, and the
// closed-form yield predictions for raw and repaired lattices.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "eqc/lattice.hpp"
#include "eqc/protocols.hpp"
#include "eqc/random.hpp"

namespace eqc {

/// Probability of 0..4 atoms (all in level a) at each site, iid.
class FillDistribution {
 public:
  static constexpr int kMaxOccupancy = 4;

  /// Throws std::invalid_argument unless every p is in [0,1] and they sum to
  /// 1 within 1e-12.
  explicit FillDistribution(std::array<double, kMaxOccupancy + 1> p);

  /// p2 takes whatever mass p0 and p1 leave.
  static FillDistribution from_defects(double p0, double p1);

  double operator[](int occupancy) const { return p_[static_cast<std::size_t>(occupancy)]; }
  const std::array<double, kMaxOccupancy + 1>& probabilities() const { return p_; }
  int max_occupancy() const;

 private:
  std::array<double, kMaxOccupancy + 1> p_;
};

BasisConfig sample_lattice(std::size_t length, const FillDistribution& dist, Rng& rng);

/// L p1 (1 - p0 - p1)^n
double expected_yield(double length, double p0, double p1, int n);
/// (L/n)(1 - 1/n)^n
double repaired_yield(double length, int n);
/// L / (n e)
double repaired_yield_asymptote(double length, int n);

enum class YieldMode { Oracle, FullProtocol };

struct YieldReport {
  std::size_t trials = 0;
  double mean = 0.0;
  double stderr_mean = 0.0;
  double prediction = 0.0;
  double z_score = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> counts;
};

/// Mean and standard error of `counts`, compared against `prediction`.
YieldReport summarize(std::vector<std::uint64_t> seeds, std::vector<double> counts,
                      double prediction);

/// Computers surviving depopulation + formatting of one lattice. Oracle mode
/// evaluates the window predicate; full-protocol mode runs the scripts.
std::size_t count_computers(const BasisConfig& lattice, int n, YieldMode mode);

/// Trial i uses seed trial_seed(seed, i); `jobs` worker threads share the
/// trials without affecting results.
YieldReport monte_carlo_yield(std::size_t length, const FillDistribution& dist, int n,
                              std::size_t trials, std::uint64_t seed, YieldMode mode,
                              unsigned jobs = 1);

struct RepairExperimentReport {
  std::size_t length = 0;
  int n = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  double p0_before = 0.0;
  double p1_before = 0.0;
  double p0_repaired = 0.0;  ///< right after repair, before new defects
  double p1_repaired = 0.0;
  double p0_after = 0.0;
  double p1_after = 0.0;
  std::size_t donors = 0;
  std::size_t defects = 0;  ///< empty sites count twice: they need two atoms
  double donor_defect_ratio = 0.0;
  bool insufficient_donors = false;
  std::size_t residual_defects = 0;
  RepairReport repair;
  std::size_t yield_before = 0;
  std::size_t yield_after = 0;
};

/// depopulate(4) + exhaustive repair + defect creation with probability eps
/// + oracle count on one sampled lattice.
RepairExperimentReport repair_experiment(std::size_t length, const FillDistribution& dist,
                                         int n, double eps, std::uint64_t seed);

/// repair_experiment over many trials with eps = 1/n, compared against
/// repaired_yield.
YieldReport repaired_yield_study(std::size_t length, const FillDistribution& dist, int n,
                                 std::size_t trials, std::uint64_t seed, unsigned jobs = 1);

/// Runs fn(i) for i in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, unsigned jobs,
                  const std::function<void(std::size_t)>& fn);

}  // namespace eqc
