#pragma once

// Second-quantized states of a 1D lattice whose sites carry three internal
// levels a, b and p. Classical Fock configurations, sparse superpositions
// and weighted ensembles of superpositions.

#include <complex>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace eqc {

using Amplitude = std::complex<double>;

inline constexpr int kDefaultMaxCount = 6;
/// Amplitudes below this magnitude are dropped from sparse states.
inline constexpr double kPruneThreshold = 1e-14;
inline constexpr double kNormTolerance = 1e-10;
/// Branches whose amplitudes agree to this tolerance are merged.
inline constexpr double kMergeTolerance = 1e-12;

class OverflowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Per-level occupation cutoff. Operations that would push any count past
/// `max_count` throw OverflowError.
struct Limits {
  int max_count = kDefaultMaxCount;
};

enum class Level : std::uint8_t { A, B, P };

const char* level_name(Level level);

struct SiteOccupancy {
  std::uint8_t a = 0;
  std::uint8_t b = 0;
  std::uint8_t p = 0;

  constexpr SiteOccupancy() = default;
  constexpr SiteOccupancy(int a_count, int b_count, int p_count)
      : a(static_cast<std::uint8_t>(a_count)),
        b(static_cast<std::uint8_t>(b_count)),
        p(static_cast<std::uint8_t>(p_count)) {}

  constexpr int total() const { return a + b + p; }
  constexpr int count(Level level) const {
    switch (level) {
      case Level::A: return a;
      case Level::B: return b;
      case Level::P: return p;
    }
    return 0;
  }
  constexpr void set(Level level, int value) {
    const auto v = static_cast<std::uint8_t>(value);
    switch (level) {
      case Level::A: a = v; break;
      case Level::B: b = v; break;
      case Level::P: p = v; break;
    }
  }
  constexpr bool empty() const { return a == 0 && b == 0 && p == 0; }

  friend constexpr auto operator<=>(const SiteOccupancy&,
                                    const SiteOccupancy&) = default;
};

std::string to_string(const SiteOccupancy& site);

/// Fock basis label of a whole lattice; sites are indexed 0..L-1 from left
/// to right. Also used directly as a classical lattice state.
class BasisConfig {
 public:
  BasisConfig() = default;
  explicit BasisConfig(std::size_t length) : sites_(length) {}
  explicit BasisConfig(std::vector<SiteOccupancy> sites)
      : sites_(std::move(sites)) {}
  BasisConfig(std::initializer_list<SiteOccupancy> sites) : sites_(sites) {}

  /// Lattice with every atom in level a.
  static BasisConfig from_a_counts(std::span<const int> counts);
  static BasisConfig from_a_counts(std::initializer_list<int> counts);

  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }

  SiteOccupancy& operator[](std::size_t k) { return sites_[k]; }
  const SiteOccupancy& operator[](std::size_t k) const { return sites_[k]; }

  auto begin() { return sites_.begin(); }
  auto end() { return sites_.end(); }
  auto begin() const { return sites_.begin(); }
  auto end() const { return sites_.end(); }

  std::span<const SiteOccupancy> sites() const { return sites_; }

  long total(Level level) const;
  long total_atoms() const;
  int max_count() const;

  /// Number of sites whose (a, b, p) equals `pattern`.
  std::size_t count_sites(const SiteOccupancy& pattern) const;

  friend auto operator<=>(const BasisConfig&, const BasisConfig&) = default;
  friend bool operator==(const BasisConfig&, const BasisConfig&) = default;

 private:
  std::vector<SiteOccupancy> sites_;
};

std::string to_string(const BasisConfig& config);

/// Throws OverflowError if any count in `config` exceeds the cutoff.
void check_limits(const BasisConfig& config, const Limits& limits);

/// Normalized sparse superposition over BasisConfig, kept in canonical key
/// order so that iteration is reproducible.
class PureState {
 public:
  using TermMap = std::map<BasisConfig, Amplitude>;

  explicit PureState(BasisConfig config, Amplitude amplitude = 1.0);

  /// Prunes tiny amplitudes and renormalizes. Throws std::invalid_argument
  /// on an empty/zero-norm map and DimensionMismatch on mixed lengths.
  static PureState from_terms(TermMap terms);

  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  std::size_t length() const { return terms_.begin()->first.size(); }
  bool is_basis_state() const { return terms_.size() == 1; }
  Amplitude amplitude(const BasisConfig& config) const;
  double norm_squared() const;

 private:
  PureState() = default;
  TermMap terms_;
};

/// <x|y>
Amplitude inner_product(const PureState& x, const PureState& y);

struct Branch {
  double weight;
  PureState state;
};

/// Ensemble of pure branches produced by emptying channels and measurements.
class MixedState {
 public:
  MixedState(PureState state);  // NOLINT: a pure state is a one-branch mixture

  /// Drops zero-weight branches, renormalizes weights, and merges branches
  /// with identical term sets.
  static MixedState from_branches(std::vector<Branch> branches);

  const std::vector<Branch>& branches() const { return branches_; }
  std::size_t length() const { return branches_.front().state.length(); }

  /// One branch holding a single basis term.
  bool is_classical() const;
  const BasisConfig& classical_config() const;
  bool is_pure() const { return branches_.size() == 1; }
  const PureState& pure() const;

 private:
  MixedState() = default;
  std::vector<Branch> branches_;
};

MixedState classical(const BasisConfig& config, const Limits& limits = {});

/// Pairwise comparison of branches: branch i of x against branch i of y.
/// Pure inputs reduce to |<x|y>|^2.
double fidelity(const MixedState& x, const MixedState& y);

/// Exact comparison of branch sets (order independent) up to `tolerance`
/// on weights and amplitudes.
bool strictly_equal(const MixedState& x, const MixedState& y,
                    double tolerance = kMergeTolerance);

struct LevelCount {
  double expectation = 0.0;
  bool deterministic = true;
  /// Exact count for branches whose terms all agree; nullopt otherwise.
  std::vector<std::optional<long>> branch_counts;
};

LevelCount level_count(const MixedState& state, Level level);

}  // namespace eqc
