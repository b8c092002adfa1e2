#include "eqc/protocols.hpp"

#include <algorithm>
#include <cmath>

namespace eqc {

namespace {

std::size_t wrap_left(std::size_t k, std::size_t j, std::size_t length) {
  return (k + length - (j % length)) % length;
}

void require_a_only(const BasisConfig& config, int max_a, const char* what) {
  for (std::size_t k = 0; k < config.size(); ++k) {
    const auto& s = config[k];
    if (s.b != 0 || s.p != 0 || s.a > max_a) {
      throw std::invalid_argument(std::string(what) + ": site " +
                                  std::to_string(k) + " " + to_string(s) +
                                  " must hold at most " + std::to_string(max_a) +
                                  " atoms, all in level a");
    }
  }
}

std::size_t count_a(const BasisConfig& config, int a) {
  return config.count_sites(SiteOccupancy(a, 0, 0));
}

std::string join_sites(const std::vector<std::size_t>& sites) {
  std::string out;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(sites[i]);
  }
  return out;
}

}  // namespace

StrayAtomsError::StrayAtomsError(std::vector<std::size_t> sites)
    : std::runtime_error("stray atoms at sites " + join_sites(sites)),
      sites_(std::move(sites)) {}

ProtocolScript depopulate_script(int cutoff, int target) {
  if (target != 2 && target != 4) {
    throw std::invalid_argument("depopulation target must be 2 or 4");
  }
  if (cutoff < target) throw std::invalid_argument("cutoff below target");
  ProtocolScript script;
  for (int x = target + 1; x <= cutoff; ++x) {
    script.push(transfer(x, 0, target, x - target)).push(EmptyP{});
  }
  return script;
}

ProtocolScript format_script(int n) {
  if (n < 1) throw std::invalid_argument("computer size n must be >= 1");
  ProtocolScript script;
  // 1) single atoms become pointers
  script.push(transfer(1, 0, 0, 1));
  // 2) walk left n sites; a pointer survives E_p only on 2-atom sites
  script.repeat({Shift{-1}, transfer(2, 1, 3, 0), EmptyP{}, transfer(2, 1, 3, 0)}, n);
  // 3) pick up one atom from the leftmost reserved site
  script.push(transfer(2, 1, 1, 2));
  // 4) walk back right, discarding one atom per reserved site
  script.repeat({Shift{1}, transfer(2, 2, 3, 1), EmptyP{}, transfer(3, 0, 1, 2)}, n - 1);
  // 5) park at home and clear every unreserved 2-atom site
  script.push(Shift{1})
      .push(transfer(2, 0, 0, 2))
      .push(EmptyP{})
      .push(transfer(2, 0, 1, 1));
  return script;
}

std::vector<ComputerDescriptor> oracle_computers(const BasisConfig& initial, int n) {
  if (n < 1) throw std::invalid_argument("computer size n must be >= 1");
  require_a_only(initial, 2, "oracle_computers");
  const std::size_t length = initial.size();
  std::vector<ComputerDescriptor> found;
  for (std::size_t k = 0; k < length; ++k) {
    if (initial[k].a != 1) continue;
    bool ok = true;
    for (int j = 1; j <= n && ok; ++j) {
      ok = initial[wrap_left(k, j, length)].a == 2;
    }
    if (!ok) continue;
    ComputerDescriptor d{k, n, {}};
    for (int j = 1; j <= n; ++j) d.qubit_sites.push_back(wrap_left(k, j, length));
    found.push_back(std::move(d));
  }
  return found;
}

std::vector<ComputerDescriptor> verify_formatted(const BasisConfig& config, int n) {
  if (n < 1) throw std::invalid_argument("computer size n must be >= 1");
  const std::size_t length = config.size();
  const SiteOccupancy home_pattern(1, 0, 1);
  const SiteOccupancy qubit_pattern(1, 0, 0);
  std::vector<int> owner(length, -1);
  std::vector<ComputerDescriptor> found;
  std::vector<std::size_t> stray;

  for (std::size_t k = 0; k < length; ++k) {
    if (config[k] != home_pattern) continue;
    bool ok = static_cast<std::size_t>(n) < length;
    for (int j = 1; j <= n && ok; ++j) {
      const std::size_t site = wrap_left(k, j, length);
      ok = config[site] == qubit_pattern && owner[site] < 0;
    }
    if (!ok) continue;
    ComputerDescriptor d{k, n, {}};
    owner[k] = static_cast<int>(found.size());
    for (int j = 1; j <= n; ++j) {
      const std::size_t site = wrap_left(k, j, length);
      owner[site] = static_cast<int>(found.size());
      d.qubit_sites.push_back(site);
    }
    found.push_back(std::move(d));
  }
  for (std::size_t k = 0; k < length; ++k) {
    if (!config[k].empty() && owner[k] < 0) stray.push_back(k);
  }
  if (!stray.empty()) throw StrayAtomsError(std::move(stray));
  return found;
}

std::vector<ComputerDescriptor> verify_formatted(const MixedState& state, int n) {
  if (!state.is_classical()) {
    throw std::invalid_argument("verify_formatted needs a classical state");
  }
  return verify_formatted(state.classical_config(), n);
}

BasisConfig formatted_lattice(std::size_t length,
                              const std::vector<std::size_t>& homes, int n) {
  BasisConfig config(length);
  for (std::size_t home : homes) {
    if (home >= length) throw std::invalid_argument("home outside lattice");
    auto claim = [&](std::size_t site, SiteOccupancy occ) {
      if (!config[site].empty()) {
        throw std::invalid_argument("overlapping computers at site " +
                                    std::to_string(site));
      }
      config[site] = occ;
    };
    claim(home, SiteOccupancy(1, 0, 1));
    for (int j = 1; j <= n; ++j) claim(wrap_left(home, j, length), SiteOccupancy(1, 0, 0));
  }
  return config;
}

// ---------------------------------------------------------------- repair

ProtocolScript repair_round_script(int x, RepairPhase phase) {
  if (x < 1) throw std::invalid_argument("repair shift must be >= 1");
  const PairTransfer lend = transfer(4, 0, 2, 2);
  const PairTransfer deposit = phase == RepairPhase::FillEmpty
                                   ? transfer(0, 2, 1, 1)
                                   : transfer(1, 2, 2, 1);
  return ProtocolScript{lend, Shift{x}, deposit, Shift{-x}, lend, EmptyP{}};
}

RepairOutcome repair(const BasisConfig& config, const RepairSchedule& schedule,
                     const Limits& limits) {
  require_a_only(config, 4, "repair");
  const std::size_t length = config.size();
  RepairOutcome out{config, {}};
  const long atoms_before = config.total_atoms();

  Rng rng(schedule.seed);
  for (RepairPhase phase : {RepairPhase::FillEmpty, RepairPhase::FillSingle}) {
    const int defect = phase == RepairPhase::FillEmpty ? 0 : 1;
    std::vector<int> offsets;
    if (length >= 2) {
      if (schedule.kind == RepairSchedule::Kind::Exhaustive) {
        for (std::size_t x = 1; x < length; ++x) offsets.push_back(static_cast<int>(x));
      } else {
        for (int r = 0; r < schedule.rounds; ++r) {
          offsets.push_back(1 + static_cast<int>(uniform_below(rng, length - 1)));
        }
      }
    }
    std::size_t defects = count_a(out.config, defect);
    for (int x : offsets) {
      if (defects == 0 || count_a(out.config, 4) == 0) break;
      out.config = run_classical(std::move(out.config),
                                 repair_round_script(x, phase), limits).config;
      ++out.report.rounds;
      const std::size_t after = count_a(out.config, defect);
      const long fixed = static_cast<long>(defects) - static_cast<long>(after);
      (phase == RepairPhase::FillEmpty ? out.report.empty_fixed
                                       : out.report.single_fixed) += fixed;
      defects = after;
    }
  }

  out.report.defects_fixed = out.report.empty_fixed + out.report.single_fixed;
  out.report.atoms_lost = atoms_before - out.config.total_atoms();
  out.report.residual_empty = count_a(out.config, 0);
  out.report.residual_single = count_a(out.config, 1);
  out.report.donors_remaining = count_a(out.config, 4);
  return out;
}

// ------------------------------------------------------- defect creation

ProtocolScript create_defects_script(double eps, int cutoff) {
  ProtocolScript script = depopulate_script(std::max(cutoff, 2), 2);
  script.push(DefectSplit{eps}).push(EmptyB{});
  validate(DefectSplit{eps});
  return script;
}

BasisConfig sample_defects(const BasisConfig& config, double eps, Rng& rng,
                           int cutoff, const Limits& limits) {
  validate(DefectSplit{eps});
  BasisConfig out =
      run_classical(config, depopulate_script(std::max(cutoff, 2), 2), limits).config;
  const SiteOccupancy pair(2, 0, 0);
  for (auto& s : out) {
    if (s == pair && uniform01(rng) < eps) s = SiteOccupancy(1, 0, 0);
  }
  return out;
}

}  // namespace eqc
