#include "eqc/stats.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace eqc {

FillDistribution::FillDistribution(std::array<double, kMaxOccupancy + 1> p) : p_(p) {
  double sum = 0.0;
  for (double v : p_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("fill probabilities must lie in [0,1]");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("fill probabilities must sum to 1, got " +
                                std::to_string(sum));
  }
}

FillDistribution FillDistribution::from_defects(double p0, double p1) {
  return FillDistribution({p0, p1, 1.0 - p0 - p1, 0.0, 0.0});
}

int FillDistribution::max_occupancy() const {
  for (int k = kMaxOccupancy; k > 0; --k) {
    if (p_[static_cast<std::size_t>(k)] > 0.0) return k;
  }
  return 0;
}

BasisConfig sample_lattice(std::size_t length, const FillDistribution& dist, Rng& rng) {
  std::array<double, FillDistribution::kMaxOccupancy + 1> cdf{};
  std::partial_sum(dist.probabilities().begin(), dist.probabilities().end(), cdf.begin());
  const int top = dist.max_occupancy();
  BasisConfig config(length);
  for (auto& site : config) {
    const double u = uniform01(rng);
    int k = 0;
    while (k < top && u >= cdf[static_cast<std::size_t>(k)]) ++k;
    site = SiteOccupancy(k, 0, 0);
  }
  return config;
}

double expected_yield(double length, double p0, double p1, int n) {
  if (p0 < 0.0 || p1 < 0.0 || p0 + p1 > 1.0 + 1e-12) {
    throw std::invalid_argument("invalid defect probabilities");
  }
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  return length * p1 * std::pow(std::max(0.0, 1.0 - p0 - p1), n);
}

double repaired_yield(double length, int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  return length / n * std::pow(1.0 - 1.0 / n, n);
}

double repaired_yield_asymptote(double length, int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  return length / (n * std::numbers::e);
}

YieldReport summarize(std::vector<std::uint64_t> seeds, std::vector<double> counts,
                      double prediction) {
  YieldReport r;
  r.trials = counts.size();
  r.prediction = prediction;
  if (r.trials > 0) {
    r.mean = std::accumulate(counts.begin(), counts.end(), 0.0) / double(r.trials);
  }
  if (r.trials > 1) {
    double ss = 0.0;
    for (double c : counts) ss += (c - r.mean) * (c - r.mean);
    r.stderr_mean = std::sqrt(ss / double(r.trials - 1) / double(r.trials));
  }
  const double diff = r.mean - prediction;
  if (r.stderr_mean > 0.0) {
    r.z_score = diff / r.stderr_mean;
  } else {
    r.z_score = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  r.seeds = std::move(seeds);
  r.counts = std::move(counts);
  return r;
}

std::size_t count_computers(const BasisConfig& lattice, int n, YieldMode mode) {
  const int cutoff = std::max(2, lattice.max_count());
  const BasisConfig depopulated =
      run_classical(lattice, depopulate_script(cutoff, 2)).config;
  if (mode == YieldMode::Oracle) return oracle_computers(depopulated, n).size();
  const BasisConfig formatted = run_classical(depopulated, format_script(n)).config;
  return verify_formatted(formatted, n).size();
}

void parallel_for(std::size_t count, unsigned jobs,
                  const std::function<void(std::size_t)>& fn) {
  jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

YieldReport monte_carlo_yield(std::size_t length, const FillDistribution& dist, int n,
                              std::size_t trials, std::uint64_t seed, YieldMode mode,
                              unsigned jobs) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  std::vector<std::uint64_t> seeds(trials);
  std::vector<double> counts(trials);
  parallel_for(trials, jobs, [&](std::size_t i) {
    seeds[i] = trial_seed(seed, i);
    Rng rng(seeds[i]);
    counts[i] = double(count_computers(sample_lattice(length, dist, rng), n, mode));
  });
  // Depopulation folds every occupancy >= 2 into the two-atom class, so the
  // prediction only needs p0 and p1.
  return summarize(std::move(seeds), std::move(counts),
                   expected_yield(double(length), dist[0], dist[1], n));
}

RepairExperimentReport repair_experiment(std::size_t length, const FillDistribution& dist,
                                         int n, double eps, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  RepairExperimentReport r;
  r.length = length;
  r.n = n;
  r.eps = eps;
  r.seed = seed;
  const double l = double(length);

  Rng rng(seed);
  const BasisConfig initial = sample_lattice(length, dist, rng);
  r.p0_before = double(initial.count_sites({0, 0, 0})) / l;
  r.p1_before = double(initial.count_sites({1, 0, 0})) / l;
  r.yield_before = count_computers(initial, n, YieldMode::Oracle);

  const BasisConfig depopulated =
      run_classical(initial, depopulate_script(std::max(4, initial.max_count()), 4)).config;
  r.donors = depopulated.count_sites({4, 0, 0});
  r.defects = 2 * depopulated.count_sites({0, 0, 0}) + depopulated.count_sites({1, 0, 0});
  r.donor_defect_ratio = r.defects == 0 ? std::numeric_limits<double>::infinity()
                                        : double(r.donors) / double(r.defects);

  RepairOutcome repaired = repair(depopulated);
  r.repair = repaired.report;
  r.residual_defects = repaired.report.residual_empty + repaired.report.residual_single;
  r.insufficient_donors = r.residual_defects > 0;
  r.p0_repaired = double(repaired.report.residual_empty) / l;
  r.p1_repaired = double(repaired.report.residual_single) / l;

  const BasisConfig final_lattice = sample_defects(repaired.config, eps, rng);
  r.p0_after = double(final_lattice.count_sites({0, 0, 0})) / l;
  r.p1_after = double(final_lattice.count_sites({1, 0, 0})) / l;
  r.yield_after = oracle_computers(final_lattice, n).size();
  return r;
}

YieldReport repaired_yield_study(std::size_t length, const FillDistribution& dist, int n,
                                 std::size_t trials, std::uint64_t seed, unsigned jobs) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  std::vector<std::uint64_t> seeds(trials);
  std::vector<double> counts(trials);
  parallel_for(trials, jobs, [&](std::size_t i) {
    seeds[i] = trial_seed(seed, i);
    counts[i] = double(repair_experiment(length, dist, n, 1.0 / n, seeds[i]).yield_after);
  });
  return summarize(std::move(seeds), std::move(counts), repaired_yield(double(length), n));
}

}  // namespace eqc
