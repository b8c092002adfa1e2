#include "eqc/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace eqc {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

using LocalColumn = std::vector<std::pair<SiteOccupancy, Amplitude>>;

void check_transfer(const PairTransfer& op, const Limits& limits) {
  validate(op);
  const int hi = std::max({op.m, op.n, op.m + op.x, op.n - op.x});
  if (hi > limits.max_count) {
    throw OverflowError("pair transfer " + to_text(op) +
                        " exceeds occupation cutoff " +
                        std::to_string(limits.max_count));
  }
}

// Sites with b != 0 are fixed points: the transfer acts on |m,0,n> factors.
inline void transfer_site(SiteOccupancy& s, const PairTransfer& op) {
  if (s.b != 0 || op.x == 0) return;
  if (s.a == op.m && s.p == op.n) {
    s.a = static_cast<std::uint8_t>(op.m + op.x);
    s.p = static_cast<std::uint8_t>(op.n - op.x);
  } else if (s.a == op.m + op.x && s.p == op.n - op.x) {
    s.a = static_cast<std::uint8_t>(op.m);
    s.p = static_cast<std::uint8_t>(op.n);
  }
}

inline void w_swap_site(SiteOccupancy& s) {
  if (s.p != 1) return;
  if (s.a == 1 && s.b == 0) {
    s.a = 0;
    s.b = 1;
  } else if (s.a == 0 && s.b == 1) {
    s.a = 1;
    s.b = 0;
  }
}

inline long ap_pairs(const BasisConfig& config) {
  long pairs = 0;
  for (const auto& s : config) pairs += long(s.a) * long(s.p);
  return pairs;
}

inline Amplitude collision_phase(const BasisConfig& config, double phi) {
  const long pairs = ap_pairs(config);
  if (pairs == 0) return Amplitude{1.0};
  return std::polar(1.0, phi * double(pairs));
}

std::size_t wrap(long k, std::size_t length) {
  const long l = static_cast<long>(length);
  return static_cast<std::size_t>(((k % l) + l) % l);
}

void shift_config(BasisConfig& config, int x, std::vector<std::uint8_t>& scratch) {
  const std::size_t length = config.size();
  const std::size_t offset = wrap(x, length);
  if (offset == 0) return;
  scratch.resize(length);
  for (std::size_t k = 0; k < length; ++k) scratch[k] = config[k].p;
  for (std::size_t k = 0; k < length; ++k) {
    config[(k + offset) % length].p = scratch[k];
  }
}

template <class Fn>
PureState map_configs(const PureState& psi, Fn&& fn) {
  PureState::TermMap out;
  for (const auto& [cfg, amp] : psi.terms()) {
    BasisConfig next = cfg;
    Amplitude a = amp;
    fn(next, a);
    out[std::move(next)] += a;
  }
  return PureState::from_terms(std::move(out));
}

// Applies a site-local linear map at every site. `column(site)` returns the
// image of that site factor, or nullopt where the map is the identity.
template <class ColumnFn>
PureState apply_sitewise(const PureState& psi, ColumnFn&& column) {
  PureState::TermMap current = psi.terms();
  const std::size_t length = psi.length();
  for (std::size_t k = 0; k < length; ++k) {
    PureState::TermMap next;
    bool touched = false;
    for (const auto& [cfg, amp] : current) {
      std::optional<LocalColumn> col = column(cfg[k]);
      if (!col) {
        next[cfg] += amp;
        continue;
      }
      touched = true;
      for (const auto& [occ, coeff] : *col) {
        BasisConfig out = cfg;
        out[k] = occ;
        next[std::move(out)] += amp * coeff;
      }
    }
    if (!touched) continue;
    for (auto it = next.begin(); it != next.end();) {
      it = std::abs(it->second) < kPruneThreshold ? next.erase(it) : std::next(it);
    }
    current = std::move(next);
  }
  return PureState::from_terms(std::move(current));
}

template <class Fn>
MixedState branchwise(const MixedState& rho, Fn&& fn) {
  std::vector<Branch> out;
  out.reserve(rho.branches().size());
  for (const auto& br : rho.branches()) {
    out.push_back(Branch{br.weight, fn(br.state)});
  }
  return MixedState::from_branches(std::move(out));
}

}  // namespace

// ------------------------------------------------------------------- unitaries

PureState pair_transfer(const PureState& psi, const PairTransfer& op,
                        const Limits& limits) {
  check_transfer(op, limits);
  return map_configs(psi, [&](BasisConfig& cfg, Amplitude&) {
    for (auto& s : cfg) transfer_site(s, op);
  });
}

PureState w_swap(const PureState& psi) {
  return map_configs(psi, [](BasisConfig& cfg, Amplitude&) {
    for (auto& s : cfg) w_swap_site(s);
  });
}

Eigen::MatrixXcd ab_rotation_sector(int total, double theta) {
  const int dim = total + 1;
  // Basis index m is the a-count; b = total - m. The hopping generator
  // a^dag b + b^dag a couples m and m-1 with weight sqrt(m (total - m + 1)).
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int m = 1; m <= total; ++m) {
    const double v = std::sqrt(double(m) * double(total - m + 1));
    h(m - 1, m) = v;
    h(m, m - 1) = v;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  const Eigen::MatrixXd& q = solver.eigenvectors();
  Eigen::VectorXcd phases(dim);
  for (int i = 0; i < dim; ++i) {
    phases(i) = std::polar(1.0, -theta * solver.eigenvalues()(i));
  }
  return q.cast<Amplitude>() * phases.asDiagonal() * q.transpose().cast<Amplitude>();
}

PureState ab_rotation(const PureState& psi, double theta, const Limits& limits) {
  validate(ABRotation{theta});
  std::vector<Eigen::MatrixXcd> sectors;
  sectors.reserve(limits.max_count + 1);
  for (int t = 0; t <= limits.max_count; ++t) {
    sectors.push_back(ab_rotation_sector(t, theta));
  }
  return apply_sitewise(psi, [&](const SiteOccupancy& s) -> std::optional<LocalColumn> {
    const int total = s.a + s.b;
    if (total == 0) return std::nullopt;
    if (total > limits.max_count) {
      throw OverflowError("a+b = " + std::to_string(total) + " at site " +
                          to_string(s) + " exceeds occupation cutoff " +
                          std::to_string(limits.max_count));
    }
    const auto& u = sectors[total];
    LocalColumn col;
    col.reserve(total + 1);
    for (int a = 0; a <= total; ++a) {
      col.emplace_back(SiteOccupancy(a, total - a, s.p), u(a, s.a));
    }
    return col;
  });
}

PureState collide(const PureState& psi, double phi) {
  validate(Collide{phi});
  return map_configs(psi, [&](BasisConfig& cfg, Amplitude& amp) {
    amp *= collision_phase(cfg, phi);
  });
}

PureState shift_p(const PureState& psi, int x) {
  std::vector<std::uint8_t> scratch;
  return map_configs(psi, [&](BasisConfig& cfg, Amplitude&) {
    shift_config(cfg, x, scratch);
  });
}

PureState defect_split(const PureState& psi, double eps) {
  validate(DefectSplit{eps});
  const double keep = std::sqrt(1.0 - eps);
  const double move = std::sqrt(eps);
  const SiteOccupancy pair(2, 0, 0);
  const SiteOccupancy split(1, 1, 0);
  // Real rotation on span{|2,0,0>, |1,1,0>}; first column is the stated
  // superposition, second column completes the orthogonal matrix.
  return apply_sitewise(psi, [&](const SiteOccupancy& s) -> std::optional<LocalColumn> {
    if (s == pair) return LocalColumn{{pair, keep}, {split, move}};
    if (s == split) return LocalColumn{{pair, -move}, {split, keep}};
    return std::nullopt;
  });
}

PureState apply_unitary(const PureState& psi, const PrimitiveOp& op,
                        const Limits& limits) {
  return std::visit(
      Overloaded{
          [&](const PairTransfer& t) { return pair_transfer(psi, t, limits); },
          [&](const WSwap&) { return w_swap(psi); },
          [&](const ABRotation& r) { return ab_rotation(psi, r.theta, limits); },
          [&](const Collide& c) { return collide(psi, c.phi); },
          [&](const Shift& s) { return shift_p(psi, s.x); },
          [&](const DefectSplit& d) { return defect_split(psi, d.eps); },
          [&](const auto&) -> PureState {
            throw std::invalid_argument(to_text(op) + " is not unitary");
          },
      },
      op);
}

MixedState pair_transfer(const MixedState& rho, const PairTransfer& op,
                         const Limits& limits) {
  return branchwise(rho, [&](const PureState& s) { return pair_transfer(s, op, limits); });
}
MixedState w_swap(const MixedState& rho) {
  return branchwise(rho, [](const PureState& s) { return w_swap(s); });
}
MixedState ab_rotation(const MixedState& rho, double theta, const Limits& limits) {
  return branchwise(rho, [&](const PureState& s) { return ab_rotation(s, theta, limits); });
}
MixedState collide(const MixedState& rho, double phi) {
  return branchwise(rho, [&](const PureState& s) { return collide(s, phi); });
}
MixedState shift_p(const MixedState& rho, int x) {
  return branchwise(rho, [&](const PureState& s) { return shift_p(s, x); });
}
MixedState defect_split(const MixedState& rho, double eps) {
  return branchwise(rho, [&](const PureState& s) { return defect_split(s, eps); });
}

// -------------------------------------------------------------------- channels

MixedState empty_level(const MixedState& rho, Level level) {
  std::vector<Branch> out;
  for (const auto& br : rho.branches()) {
    std::map<std::vector<std::uint8_t>, PureState::TermMap> groups;
    for (const auto& [cfg, amp] : br.state.terms()) {
      std::vector<std::uint8_t> pattern(cfg.size());
      BasisConfig cleared = cfg;
      for (std::size_t k = 0; k < cfg.size(); ++k) {
        pattern[k] = static_cast<std::uint8_t>(cfg[k].count(level));
        cleared[k].set(level, 0);
      }
      groups[std::move(pattern)].emplace(std::move(cleared), amp);
    }
    for (auto& [pattern, terms] : groups) {
      double w = 0.0;
      for (const auto& [cfg, amp] : terms) w += std::norm(amp);
      if (w <= 0.0) continue;
      out.push_back(Branch{br.weight * w, PureState::from_terms(std::move(terms))});
    }
  }
  return MixedState::from_branches(std::move(out));
}

CountOutcome count_p(const MixedState& rho, CountMode mode, Rng* rng) {
  // Born probability of each total count, summed over branches.
  std::map<long, double> distribution;
  double expectation = 0.0;
  for (const auto& br : rho.branches()) {
    for (const auto& [cfg, amp] : br.state.terms()) {
      const long c = cfg.total(Level::P);
      const double pr = br.weight * std::norm(amp);
      distribution[c] += pr;
      expectation += pr * double(c);
    }
  }
  if (distribution.size() == 1) {
    return CountOutcome{double(distribution.begin()->first), true, rho};
  }
  if (mode == CountMode::Expect) return CountOutcome{expectation, false, rho};
  if (rng == nullptr) {
    throw std::invalid_argument("sampling a non-deterministic count needs an rng");
  }

  double total = 0.0;
  for (const auto& [c, pr] : distribution) total += pr;
  const double u = uniform01(*rng) * total;
  long outcome = distribution.rbegin()->first;
  double acc = 0.0;
  for (const auto& [c, pr] : distribution) {
    acc += pr;
    if (u < acc) {
      outcome = c;
      break;
    }
  }

  std::vector<Branch> projected;
  for (const auto& br : rho.branches()) {
    PureState::TermMap kept;
    double w = 0.0;
    for (const auto& [cfg, amp] : br.state.terms()) {
      if (cfg.total(Level::P) == outcome) {
        kept.emplace(cfg, amp);
        w += std::norm(amp);
      }
    }
    if (kept.empty() || w <= 0.0) continue;
    projected.push_back(Branch{br.weight * w, PureState::from_terms(std::move(kept))});
  }
  return CountOutcome{double(outcome), false,
                      MixedState::from_branches(std::move(projected))};
}

// ----------------------------------------------------------------- interpreter

MixedState apply_op(const MixedState& rho, const PrimitiveOp& op,
                    const Limits& limits) {
  if (std::holds_alternative<EmptyB>(op)) return empty_b(rho);
  if (std::holds_alternative<EmptyP>(op)) return empty_p(rho);
  if (std::holds_alternative<CountP>(op)) return rho;
  return branchwise(rho, [&](const PureState& s) { return apply_unitary(s, op, limits); });
}

void apply_classical(BasisConfig& config, const PrimitiveOp& op,
                     Amplitude& phase, const Limits& limits) {
  std::vector<std::uint8_t> scratch;
  std::visit(
      Overloaded{
          [&](const PairTransfer& t) {
            check_transfer(t, limits);
            for (auto& s : config) transfer_site(s, t);
          },
          [&](const WSwap&) {
            for (auto& s : config) w_swap_site(s);
          },
          [&](const Collide& c) {
            validate(c);
            phase *= collision_phase(config, c.phi);
          },
          [&](const Shift& s) { shift_config(config, s.x, scratch); },
          [&](const EmptyB&) {
            for (auto& s : config) s.b = 0;
          },
          [&](const EmptyP&) {
            for (auto& s : config) s.p = 0;
          },
          [&](const CountP&) {},
          [&](const auto&) {
            throw std::invalid_argument(to_text(op) +
                                        " does not preserve the Fock basis");
          },
      },
      op);
}

ClassicalRun run_classical(BasisConfig config, const ProtocolScript& script,
                           const Limits& limits) {
  if (!script.is_basis_preserving()) {
    throw std::invalid_argument("script contains superposing operations");
  }
  ClassicalRun run{std::move(config), Amplitude{1.0}, {}};
  std::vector<std::uint8_t> scratch;
  for (const auto& op : script) {
    if (const auto* s = std::get_if<Shift>(&op)) {
      shift_config(run.config, s->x, scratch);
    } else if (std::holds_alternative<CountP>(op)) {
      run.counts.push_back(run.config.total(Level::P));
    } else {
      apply_classical(run.config, op, run.phase, limits);
    }
  }
  return run;
}

ExecutionResult apply(const MixedState& rho, const ProtocolScript& script,
                      const ApplyOptions& options) {
  if (options.fast_path && rho.is_classical() && script.is_basis_preserving()) {
    const auto& [cfg, amp] = *rho.pure().terms().begin();
    ClassicalRun run = run_classical(cfg, script, options.limits);
    ExecutionResult result{MixedState(PureState(std::move(run.config), amp * run.phase)),
                           {}, true};
    result.counts.assign(run.counts.begin(), run.counts.end());
    return result;
  }

  ExecutionResult result{rho, {}, false};
  for (const auto& op : script) {
    if (std::holds_alternative<CountP>(op)) {
      CountOutcome c = count_p(result.state, options.count_mode, options.rng);
      result.counts.push_back(c.value);
      result.state = std::move(c.state);
    } else {
      result.state = apply_op(result.state, op, options.limits);
    }
  }
  return result;
}

}  // namespace eqc
