#include "eqc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace eqc {

const char* level_name(Level level) {
  switch (level) {
    case Level::A: return "a";
    case Level::B: return "b";
    case Level::P: return "p";
  }
  return "?";
}

std::string to_string(const SiteOccupancy& site) {
  std::ostringstream out;
  out << '(' << int(site.a) << ',' << int(site.b) << ',' << int(site.p) << ')';
  return out.str();
}

BasisConfig BasisConfig::from_a_counts(std::span<const int> counts) {
  std::vector<SiteOccupancy> sites;
  sites.reserve(counts.size());
  for (int c : counts) {
    if (c < 0 || c > 255) {
      throw std::invalid_argument("occupation count out of range: " +
                                  std::to_string(c));
    }
    sites.emplace_back(c, 0, 0);
  }
  return BasisConfig(std::move(sites));
}

BasisConfig BasisConfig::from_a_counts(std::initializer_list<int> counts) {
  return from_a_counts(std::span<const int>(counts.begin(), counts.size()));
}

long BasisConfig::total(Level level) const {
  long sum = 0;
  for (const auto& s : sites_) sum += s.count(level);
  return sum;
}

long BasisConfig::total_atoms() const {
  long sum = 0;
  for (const auto& s : sites_) sum += s.total();
  return sum;
}

int BasisConfig::max_count() const {
  int m = 0;
  for (const auto& s : sites_) m = std::max({m, int(s.a), int(s.b), int(s.p)});
  return m;
}

std::size_t BasisConfig::count_sites(const SiteOccupancy& pattern) const {
  return static_cast<std::size_t>(
      std::count(sites_.begin(), sites_.end(), pattern));
}

std::string to_string(const BasisConfig& config) {
  std::string out = "[";
  for (std::size_t k = 0; k < config.size(); ++k) {
    if (k) out += ',';
    out += to_string(config[k]);
  }
  out += ']';
  return out;
}

void check_limits(const BasisConfig& config, const Limits& limits) {
  for (std::size_t k = 0; k < config.size(); ++k) {
    const auto& s = config[k];
    if (s.a > limits.max_count || s.b > limits.max_count ||
        s.p > limits.max_count) {
      throw OverflowError("site " + std::to_string(k) + " " + to_string(s) +
                          " exceeds occupation cutoff " +
                          std::to_string(limits.max_count));
    }
  }
}

// ---------------------------------------------------------------- PureState

PureState::PureState(BasisConfig config, Amplitude amplitude) {
  if (config.empty()) throw std::invalid_argument("lattice length must be >= 1");
  const double mag = std::abs(amplitude);
  if (!(mag > 0.0)) throw std::invalid_argument("zero amplitude");
  terms_.emplace(std::move(config), amplitude / mag);
}

PureState PureState::from_terms(TermMap terms) {
  if (terms.empty()) throw std::invalid_argument("state has no terms");
  const std::size_t length = terms.begin()->first.size();
  if (length == 0) throw std::invalid_argument("lattice length must be >= 1");
  for (auto it = terms.begin(); it != terms.end();) {
    if (it->first.size() != length) {
      throw DimensionMismatch("terms of different lattice lengths");
    }
    if (std::abs(it->second) < kPruneThreshold) {
      it = terms.erase(it);
    } else {
      ++it;
    }
  }
  double norm2 = 0.0;
  for (const auto& [cfg, amp] : terms) norm2 += std::norm(amp);
  if (terms.empty() || !(norm2 > 0.0)) {
    throw std::invalid_argument("state has zero norm");
  }
  const double scale = 1.0 / std::sqrt(norm2);
  if (std::abs(norm2 - 1.0) > 1e-15) {
    for (auto& [cfg, amp] : terms) amp *= scale;
  }
  PureState psi;
  psi.terms_ = std::move(terms);
  return psi;
}

Amplitude PureState::amplitude(const BasisConfig& config) const {
  auto it = terms_.find(config);
  return it == terms_.end() ? Amplitude{0.0} : it->second;
}

double PureState::norm_squared() const {
  double n = 0.0;
  for (const auto& [cfg, amp] : terms_) n += std::norm(amp);
  return n;
}

Amplitude inner_product(const PureState& x, const PureState& y) {
  if (x.length() != y.length()) {
    throw DimensionMismatch("inner product of states with different lengths");
  }
  // Merge-walk over the two sorted maps.
  Amplitude sum{0.0};
  auto ix = x.terms().begin();
  auto iy = y.terms().begin();
  while (ix != x.terms().end() && iy != y.terms().end()) {
    if (ix->first < iy->first) {
      ++ix;
    } else if (iy->first < ix->first) {
      ++iy;
    } else {
      sum += std::conj(ix->second) * iy->second;
      ++ix;
      ++iy;
    }
  }
  return sum;
}

// --------------------------------------------------------------- MixedState

namespace {

bool same_terms(const PureState& x, const PureState& y, double tolerance) {
  if (x.size() != y.size()) return false;
  auto ix = x.terms().begin();
  auto iy = y.terms().begin();
  for (; ix != x.terms().end(); ++ix, ++iy) {
    if (ix->first != iy->first) return false;
    if (std::abs(ix->second - iy->second) > tolerance) return false;
  }
  return true;
}

}  // namespace

MixedState::MixedState(PureState state) {
  branches_.push_back(Branch{1.0, std::move(state)});
}

MixedState MixedState::from_branches(std::vector<Branch> branches) {
  std::vector<Branch> kept;
  kept.reserve(branches.size());
  double total = 0.0;
  for (auto& br : branches) {
    if (!(br.weight > 0.0)) continue;
    if (!kept.empty() && br.state.length() != kept.front().state.length()) {
      throw DimensionMismatch("branches of different lattice lengths");
    }
    total += br.weight;
    auto match = std::find_if(kept.begin(), kept.end(), [&](const Branch& k) {
      return same_terms(k.state, br.state, kMergeTolerance);
    });
    if (match != kept.end()) {
      match->weight += br.weight;
    } else {
      kept.push_back(std::move(br));
    }
  }
  if (kept.empty()) throw std::invalid_argument("mixture has zero weight");
  for (auto& br : kept) br.weight /= total;
  MixedState rho;
  rho.branches_ = std::move(kept);
  return rho;
}

bool MixedState::is_classical() const {
  return branches_.size() == 1 && branches_.front().state.is_basis_state();
}

const BasisConfig& MixedState::classical_config() const {
  if (!is_classical()) throw std::logic_error("state is not classical");
  return branches_.front().state.terms().begin()->first;
}

const PureState& MixedState::pure() const {
  if (!is_pure()) throw std::logic_error("state is a mixture");
  return branches_.front().state;
}

MixedState classical(const BasisConfig& config, const Limits& limits) {
  check_limits(config, limits);
  return MixedState(PureState(config));
}

double fidelity(const MixedState& x, const MixedState& y) {
  if (x.length() != y.length()) {
    throw DimensionMismatch("fidelity of states with different lengths");
  }
  if (x.branches().size() != y.branches().size()) {
    throw DimensionMismatch("fidelity pairing needs equal branch counts");
  }
  double f = 0.0;
  for (std::size_t i = 0; i < x.branches().size(); ++i) {
    const auto& bx = x.branches()[i];
    const auto& by = y.branches()[i];
    f += std::sqrt(bx.weight * by.weight) *
         std::norm(inner_product(bx.state, by.state));
  }
  return std::clamp(f, 0.0, 1.0);
}

bool strictly_equal(const MixedState& x, const MixedState& y,
                    double tolerance) {
  if (x.length() != y.length()) return false;
  if (x.branches().size() != y.branches().size()) return false;
  std::vector<bool> used(y.branches().size(), false);
  for (const auto& bx : x.branches()) {
    bool found = false;
    for (std::size_t j = 0; j < y.branches().size(); ++j) {
      const auto& by = y.branches()[j];
      if (used[j] || std::abs(bx.weight - by.weight) > tolerance) continue;
      if (same_terms(bx.state, by.state, tolerance)) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

LevelCount level_count(const MixedState& state, Level level) {
  LevelCount result;
  std::optional<long> common;
  for (const auto& br : state.branches()) {
    std::optional<long> branch_value;
    bool branch_fixed = true;
    for (const auto& [cfg, amp] : br.state.terms()) {
      const long c = cfg.total(level);
      result.expectation += br.weight * std::norm(amp) * double(c);
      if (!branch_value) {
        branch_value = c;
      } else if (*branch_value != c) {
        branch_fixed = false;
      }
      if (!common) common = c;
      if (*common != c) result.deterministic = false;
    }
    result.branch_counts.push_back(branch_fixed ? branch_value : std::nullopt);
  }
  if (result.deterministic && common) {
    result.expectation = double(*common);
  }
  return result;
}

}  // namespace eqc
