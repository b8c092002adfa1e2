#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "eqc/gates.hpp"
#include "eqc/primitives.hpp"
#include "eqc/protocols.hpp"
#include "eqc/serialization.hpp"
#include "eqc/stats.hpp"

namespace eqc::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flag values for one invocation. Names follow the lattice symbols: L, n,
// p0..p4, phi, eps.
struct RunConfig {
  std::size_t L = 0;
  int n = 0;
  std::array<double, 5> p{0.0, 0.0, std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0};
  std::uint64_t seed = 1;
  std::size_t trials = 0;
  std::string mode = "oracle";
  unsigned jobs = 1;
  double eps = std::numeric_limits<double>::quiet_NaN();
  std::string lattice;
  std::string script;
  std::string out;
  std::string csv;
  bool check_oracle = false;
  bool check = false;
  bool sample = false;
  std::string gate;
  int q = 1;
  int q1 = 1;
  int q2 = 2;
  double phi = 0.0;
  double tol = 1e-10;
  double z_max = 3.0;

  FillDistribution distribution() const {
    auto probs = p;
    if (std::isnan(probs[2])) probs[2] = 1.0 - probs[0] - probs[1] - probs[3] - probs[4];
    try {
      return FillDistribution(probs);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

Json meta(const std::string& command, const RunConfig& c, Json config) {
  config["seed"] = c.seed;
  return Json{{"tool", "eqc"}, {"version", kVersion}, {"command", command},
              {"config", std::move(config)}};
}

Json distribution_json(const FillDistribution& d) {
  Json j = Json::object();
  for (int k = 0; k <= FillDistribution::kMaxOccupancy; ++k) {
    j["p" + std::to_string(k)] = d[k];
  }
  return j;
}

void emit(const RunConfig& c, const Json& artifact) {
  if (!c.out.empty()) write_file(c.out, artifact.dump(2) + "\n");
}

void add_distribution(CLI::App* sub, RunConfig& c) {
  sub->add_option("--p0", c.p[0], "probability of an empty site")->capture_default_str();
  sub->add_option("--p1", c.p[1], "probability of a one-atom site")->capture_default_str();
  sub->add_option("--p2", c.p[2], "probability of a two-atom site (default: remainder)");
  sub->add_option("--p3", c.p[3], "probability of a three-atom site")->capture_default_str();
  sub->add_option("--p4", c.p[4], "probability of a four-atom site")->capture_default_str();
}

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--seed", c.seed, "master RNG seed")->capture_default_str();
  sub->add_option("--out", c.out, "write the JSON artifact to this path");
}

// ----------------------------------------------------------------- format

int cmd_format(const RunConfig& c, std::ostream& out) {
  if (c.n < 1) throw UsageError("--n must be >= 1");
  BasisConfig initial;
  Json config{{"L", c.L}, {"n", c.n}, {"check_oracle", c.check_oracle}};
  if (!c.lattice.empty()) {
    MixedState loaded = lattice_from_json(parse_json(read_file(c.lattice)));
    if (!loaded.is_classical()) throw UsageError("format needs a classical lattice");
    initial = loaded.classical_config();
    for (const auto& s : initial) {
      if (s.b != 0 || s.p != 0) throw UsageError("format needs every atom in level a");
    }
    config["lattice"] = c.lattice;
    config["L"] = initial.size();
  } else {
    if (c.L < 1) throw UsageError("--L must be >= 1");
    const FillDistribution dist = c.distribution();
    Rng rng(c.seed);
    initial = sample_lattice(c.L, dist, rng);
    config["distribution"] = distribution_json(dist);
  }

  const int cutoff = std::max(2, initial.max_count());
  const ProtocolScript depopulate = depopulate_script(cutoff, 2);
  const BasisConfig depopulated = run_classical(initial, depopulate).config;
  const ExecutionResult formatted = apply(classical(depopulated), format_script(c.n));
  const BasisConfig& final_config = formatted.state.classical_config();

  Json artifact{{"meta", meta("format", c, config)},
                {"initial", to_json(initial)},
                {"final", to_json(final_config)}};
  int code = kSuccess;
  std::vector<ComputerDescriptor> found;
  std::string verdict;
  try {
    found = verify_formatted(final_config, c.n);
    artifact["descriptors"] = to_json(found);
  } catch (const StrayAtomsError& e) {
    artifact["stray_sites"] = e.sites();
    verdict = e.what();
    code = kCheckFailed;
  }
  if (c.check_oracle) {
    const auto expected = oracle_computers(depopulated, c.n);
    const bool match = code == kSuccess && expected == found;
    artifact["oracle_descriptors"] = to_json(expected);
    artifact["oracle_match"] = match;
    if (!match) code = kCheckFailed;
    out << "format: L=" << initial.size() << " n=" << c.n << " computers=" << found.size()
        << " oracle=" << expected.size() << (match ? " match" : " MISMATCH") << "\n";
  } else {
    out << "format: L=" << initial.size() << " n=" << c.n << " computers=" << found.size()
        << "\n";
  }
  if (!verdict.empty()) out << "format: " << verdict << "\n";
  emit(c, artifact);
  return code;
}

// ------------------------------------------------------------------ gates

int cmd_gates(const RunConfig& c, std::ostream& out) {
  GateMacro macro;
  if (c.gate == "h") {
    macro = HadamardLike{c.q};
  } else if (c.gate == "phase") {
    macro = PhaseGate{c.q, c.phi};
  } else if (c.gate == "cz") {
    macro = ControlPhasePi{c.q1, c.q2};
  } else {
    throw UsageError("--gate must be one of h, phase, cz");
  }
  Json config{{"n", c.n}, {"L", c.L}, {"gate", c.gate}, {"tol", c.tol}};
  Json artifact{{"meta", meta("gates", c, config)}, {"macro", to_json(macro)}};

  LogicalUnitary u;
  try {
    u = extract_logical_unitary(macro, c.n, {}, c.L);
  } catch (const GateFailure& e) {
    out << "gates: FAIL " << e.what() << "\n";
    artifact["error"] = e.what();
    emit(c, artifact);
    return kCheckFailed;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  Json verdicts = Json::object();
  const double unitarity = unitarity_error(u.matrix);
  verdicts["unitary"] = unitarity <= c.tol;
  verdicts["no_leakage"] = u.leakage <= c.tol;
  if (c.gate == "phase") {
    Eigen::Matrix2cd expected = Eigen::Matrix2cd::Zero();
    expected(0, 0) = std::polar(1.0, c.phi);
    expected(1, 1) = 1.0;
    verdicts["matches_diag_phase"] = (u.matrix - expected).cwiseAbs().maxCoeff() <= c.tol;
    verdicts["identity"] =
        (u.matrix - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() <= c.tol;
  } else if (c.gate == "h") {
    const HadamardCorrection h = hadamard_correction(u.matrix);
    verdicts["unbiased"] = h.bias_error <= c.tol;
    verdicts["hadamard_after_phase_correction"] = h.residual <= c.tol;
  } else {
    const ControlledPhaseSummary s = analyze_controlled_phase(u.matrix, c.tol);
    verdicts["diagonal"] = s.off_diagonal <= c.tol;
    verdicts["single_minus_one"] = s.minus_ones == 1 && s.plus_ones == 3;
    verdicts["entangling"] = s.entangling_gap > 1.0;
    artifact["phase_index"] = s.phase_index;
  }
  bool pass = true;
  for (const auto& [name, v] : verdicts.items()) {
    // The identity verdict is informational unless phi is zero.
    if (name == "identity" && c.phi != 0.0) continue;
    pass = pass && v.get<bool>();
  }
  artifact["unitary"] = to_json(u);
  artifact["unitarity_error"] = unitarity;
  artifact["verdicts"] = verdicts;
  artifact["pass"] = pass;

  out << "gates: " << c.gate << " n=" << c.n << " L=" << c.L << " leakage=" << u.leakage
      << "\n";
  out << std::setprecision(6) << std::fixed;
  for (Eigen::Index r = 0; r < u.matrix.rows(); ++r) {
    out << "  ";
    for (Eigen::Index col = 0; col < u.matrix.cols(); ++col) {
      const auto z = u.matrix(r, col);
      out << std::setw(10) << z.real() << (z.imag() < 0 ? "-" : "+") << std::setw(8)
          << std::abs(z.imag()) << "i ";
    }
    out << "\n";
  }
  out.unsetf(std::ios::floatfield);
  for (const auto& [name, v] : verdicts.items()) {
    out << "  " << name << ": " << (v.get<bool>() ? "pass" : "fail") << "\n";
  }
  out << "gates: " << (pass ? "PASS" : "FAIL") << "\n";
  emit(c, artifact);
  return pass ? kSuccess : kCheckFailed;
}

// ------------------------------------------------------------------ stats

int cmd_stats(const RunConfig& c, std::ostream& out) {
  if (c.n < 1) throw UsageError("--n must be >= 1");
  if (c.L < 1) throw UsageError("--L must be >= 1");
  if (c.trials < 1) throw UsageError("--trials must be >= 1");
  YieldMode mode;
  if (c.mode == "oracle") {
    mode = YieldMode::Oracle;
  } else if (c.mode == "full") {
    mode = YieldMode::FullProtocol;
  } else {
    throw UsageError("--mode must be oracle or full");
  }
  const FillDistribution dist = c.distribution();
  const YieldReport r = monte_carlo_yield(c.L, dist, c.n, c.trials, c.seed, mode, c.jobs);
  const bool within = std::abs(r.z_score) <= c.z_max;

  Json config{{"L", c.L}, {"n", c.n}, {"trials", c.trials}, {"mode", c.mode},
              {"jobs", c.jobs}, {"z_max", c.z_max}, {"distribution", distribution_json(dist)}};
  Json artifact{{"meta", meta("stats", c, config)}, {"report", to_json(r, true)},
                {"within_band", within}};
  emit(c, artifact);
  if (!c.csv.empty()) {
    std::ostringstream csv;
    csv << std::setprecision(17) << "seed,count\n";
    for (std::size_t i = 0; i < r.counts.size(); ++i) csv << r.seeds[i] << ',' << r.counts[i] << '\n';
    csv << "summary," << r.mean << ',' << r.stderr_mean << ',' << r.prediction << ','
        << r.z_score << '\n';
    write_file(c.csv, csv.str());
  }
  out << "stats: trials=" << r.trials << " mean=" << r.mean << " stderr=" << r.stderr_mean
      << " prediction=" << r.prediction << " z=" << r.z_score
      << (within ? " (within band)" : " (OUTSIDE band)") << "\n";
  return (c.check && !within) ? kCheckFailed : kSuccess;
}

// ----------------------------------------------------------------- repair

int cmd_repair(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.n < 1) throw UsageError("--n must be >= 1");
  if (c.L < 2) throw UsageError("--L must be >= 2");
  const double eps = std::isnan(c.eps) ? 1.0 / c.n : c.eps;
  if (!(eps >= 0.0 && eps <= 1.0)) throw UsageError("--eps must be in [0,1]");
  const FillDistribution dist = c.distribution();
  const RepairExperimentReport r = repair_experiment(c.L, dist, c.n, eps, c.seed);

  Json config{{"L", c.L}, {"n", c.n}, {"eps", eps}, {"distribution", distribution_json(dist)}};
  Json artifact{{"meta", meta("repair", c, config)}, {"report", to_json(r)},
                {"predicted_yield_after", repaired_yield(double(c.L), c.n)}};
  emit(c, artifact);
  if (r.insufficient_donors) {
    err << "warning: insufficient donors, " << r.residual_defects
        << " defects left unrepaired (donor/defect ratio " << r.donor_defect_ratio << ")\n";
  }
  out << "repair: L=" << c.L << " n=" << c.n << " p0_before=" << r.p0_before
      << " p1_before=" << r.p1_before << " p0_after=" << r.p0_after
      << " p1_after=" << r.p1_after << " atoms_lost=" << r.repair.atoms_lost
      << " rounds=" << r.repair.rounds << " yield_before=" << r.yield_before
      << " yield_after=" << r.yield_after << "\n";
  return kSuccess;
}

// -------------------------------------------------------------------- run

int cmd_run(const RunConfig& c, std::ostream& out) {
  ProtocolScript script;
  try {
    script = parse_script(read_file(c.script));
  } catch (const ScriptParseError& e) {
    throw UsageError(c.script + ": " + e.what());
  }
  const MixedState input = lattice_from_json(parse_json(read_file(c.lattice)));
  Rng rng(c.seed);
  ApplyOptions options;
  options.count_mode = c.sample ? CountMode::Sample : CountMode::Expect;
  options.rng = &rng;
  const ExecutionResult result = apply(input, script, options);

  Json artifact = to_json(result.state);
  artifact["counts"] = result.counts;
  artifact["meta"] = meta("run", c, Json{{"script", c.script}, {"lattice", c.lattice},
                                         {"sample", c.sample}});
  emit(c, artifact);
  out << "run: " << script.size() << " ops, " << result.state.branches().size()
      << " branch(es)";
  if (result.state.is_classical()) {
    out << ", final " << to_string(result.state.classical_config());
  }
  for (double v : result.counts) out << ", count " << v;
  out << "\n";
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ensemble quantum computation on defective optical lattices"};
  app.set_version_flag("--version", std::string("eqc ") + kVersion);
  app.set_config("--config", "", "read options from a TOML/INI file");
  app.require_subcommand(1);

  RunConfig format_cfg;
  format_cfg.L = 64;
  format_cfg.n = 3;
  format_cfg.p = {0.1, 0.1, std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0};
  auto* format = app.add_subcommand("format", "depopulate and format a lattice");
  format->add_option("--L", format_cfg.L, "lattice length")->capture_default_str();
  format->add_option("--n", format_cfg.n, "qubits per computer")->capture_default_str();
  add_distribution(format, format_cfg);
  format->add_option("--lattice", format_cfg.lattice, "JSON lattice instead of sampling");
  format->add_flag("--check-oracle", format_cfg.check_oracle,
                   "exit 1 unless the result matches the window predicate");
  add_common(format, format_cfg);

  RunConfig gates_cfg;
  gates_cfg.L = 12;
  gates_cfg.n = 3;
  auto* gates = app.add_subcommand("gates", "extract logical matrices of gate macros");
  gates->add_option("--n", gates_cfg.n, "qubits per computer")->capture_default_str();
  gates->add_option("--L", gates_cfg.L, "lattice length")->capture_default_str();
  gates->add_option("--gate", gates_cfg.gate, "h | phase | cz")->required();
  gates->add_option("--q", gates_cfg.q, "qubit offset (h, phase)")->capture_default_str();
  gates->add_option("--q1", gates_cfg.q1, "first qubit offset (cz)")->capture_default_str();
  gates->add_option("--q2", gates_cfg.q2, "second qubit offset (cz)")->capture_default_str();
  gates->add_option("--phi", gates_cfg.phi, "phase angle")->capture_default_str();
  gates->add_option("--tol", gates_cfg.tol, "verdict tolerance")->capture_default_str();
  add_common(gates, gates_cfg);

  RunConfig stats_cfg;
  stats_cfg.L = 100000;
  stats_cfg.n = 5;
  stats_cfg.trials = 100;
  stats_cfg.p = {0.1, 0.1, std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0};
  auto* stats = app.add_subcommand("stats", "Monte Carlo yield against the closed form");
  stats->add_option("--L", stats_cfg.L, "lattice length")->capture_default_str();
  stats->add_option("--n", stats_cfg.n, "qubits per computer")->capture_default_str();
  add_distribution(stats, stats_cfg);
  stats->add_option("--trials", stats_cfg.trials, "number of lattices")->capture_default_str();
  stats->add_option("--mode", stats_cfg.mode, "oracle | full")->capture_default_str();
  stats->add_option("--jobs", stats_cfg.jobs, "worker threads")->capture_default_str();
  stats->add_option("--csv", stats_cfg.csv, "per-trial CSV output");
  stats->add_option("--z-max", stats_cfg.z_max, "accepted |z|")->capture_default_str();
  stats->add_flag("--check", stats_cfg.check, "exit 1 when |z| exceeds --z-max");
  add_common(stats, stats_cfg);

  RunConfig repair_cfg;
  repair_cfg.L = 100000;
  repair_cfg.n = 8;
  repair_cfg.p = {0.05, 0.05, std::numeric_limits<double>::quiet_NaN(), 0.0, 0.3};
  auto* repair_cmd = app.add_subcommand("repair", "repair defects and recreate pointers");
  repair_cmd->add_option("--L", repair_cfg.L, "lattice length")->capture_default_str();
  repair_cmd->add_option("--n", repair_cfg.n, "qubits per computer")->capture_default_str();
  add_distribution(repair_cmd, repair_cfg);
  repair_cmd->add_option("--eps", repair_cfg.eps, "defect creation probability (default 1/n)");
  add_common(repair_cmd, repair_cfg);

  RunConfig run_cfg;
  auto* run_cmd = app.add_subcommand("run", "execute a protocol script on a lattice");
  run_cmd->add_option("script", run_cfg.script, "script file")->required();
  run_cmd->add_option("lattice", run_cfg.lattice, "lattice JSON file")->required();
  run_cmd->add_flag("--sample", run_cfg.sample, "sample COUNTP outcomes instead of expectations");
  add_common(run_cmd, run_cfg);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << "\n";
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (*format) return cmd_format(format_cfg, out);
    if (*gates) return cmd_gates(gates_cfg, out);
    if (*stats) return cmd_stats(stats_cfg, out);
    if (*repair_cmd) return cmd_repair(repair_cfg, out, err);
    if (*run_cmd) return cmd_run(run_cfg, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kUsageError;
}

}  // namespace eqc::cli
