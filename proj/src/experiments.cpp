#include "advsysid/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "advsysid/errors.hpp"
#include "advsysid/rng.hpp"

namespace advsysid {

std::vector<std::size_t> default_checkpoints() { return {125, 250, 500, 1000, 2000, 4000}; }

void ExperimentConfig::validate() const {
  if (d == 0) throw InvalidInput("experiment: d must be positive");
  if (fixed_system) {
    fixed_system->validate();
    if (fixed_system->dim() != d) throw InvalidInput("experiment: fixed system dimension differs from d");
  } else if (!(target_norm > 0.0 && target_norm < 1.0)) {
    throw InvalidInput("experiment: target_norm must lie in (0, 1)");
  }
  model.validate();
  if (checkpoints.empty()) throw InvalidInput("experiment: T_checkpoints must be nonempty");
  for (std::size_t k = 1; k < checkpoints.size(); ++k) {
    if (checkpoints[k] <= checkpoints[k - 1]) {
      throw InvalidInput("experiment: T_checkpoints must be strictly increasing");
    }
  }
  if (checkpoints.front() < 1) throw InvalidInput("experiment: checkpoints must be positive");
  if (trials < 1) throw InvalidInput("experiment: trials must be at least 1");
  if (!(recovery_tol > 0.0)) throw InvalidInput("experiment: recovery_tol must be positive");
  if (!(confidence_delta > 0.0 && confidence_delta <= 1.0)) {
    throw InvalidInput("experiment: confidence_delta must lie in (0, 1]");
  }
  if (estimators.empty()) throw InvalidInput("experiment: estimator list must be nonempty");
}

const EstimatorTrace* TrialResult::trace(Method m) const {
  for (const auto& t : traces)
    if (t.method == m) return &t;
  return nullptr;
}

std::size_t RecoveryReport::failure_count() const {
  std::size_t n = 0;
  for (const auto& t : trials) {
    if (!t.failure.empty()) {
      ++n;
      continue;
    }
    for (const auto& tr : t.traces)
      for (const auto& pt : tr.points)
        if (!pt.failure.empty()) ++n;
  }
  return n;
}

double RecoveryReport::recovery_rate(Method m) const {
  if (trials.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& t : trials) {
    const auto* tr = t.trace(m);
    if (tr && tr->recovery_time) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(trials.size());
}

std::optional<std::size_t> recovery_time(std::span<const std::size_t> horizons,
                                         std::span<const double> errors, double tol) {
  if (horizons.empty() || horizons.size() != errors.size()) {
    throw InvalidInput("recovery_time: trace must be nonempty with one error per checkpoint");
  }
  std::optional<std::size_t> first;
  for (std::size_t k = horizons.size(); k-- > 0;) {
    if (!(errors[k] < tol)) break;  // NaN (failed fit) never counts
    first = horizons[k];
  }
  return first;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial_index) {
  return derive_seed(master_seed, trial_index);
}

SystemSpec trial_system(const ExperimentConfig& config, std::size_t trial_index) {
  if (config.fixed_system) return *config.fixed_system;
  return random_system(config.d, config.target_norm, trial_seed(config.master_seed, trial_index));
}

Trajectory trial_trajectory(const ExperimentConfig& config, std::size_t trial_index) {
  return simulate(trial_system(config, trial_index), config.model, config.checkpoints.back(),
                  trial_seed(config.master_seed, trial_index));
}

TrialResult error_trace(const ExperimentConfig& config, std::size_t trial_index) {
  TrialResult res;
  res.trial = trial_index;
  res.seed = trial_seed(config.master_seed, trial_index);
  for (Method m : config.estimators) res.traces.push_back({m, {}, std::nullopt});

  Trajectory traj;
  SystemSpec spec;
  try {
    spec = trial_system(config, trial_index);
    traj = simulate(spec, config.model, config.checkpoints.back(), res.seed);
  } catch (const std::exception& e) {
    res.failure = e.what();
    for (auto& tr : res.traces)
      for (std::size_t horizon : config.checkpoints)
        tr.points.push_back({horizon, std::numeric_limits<double>::quiet_NaN(), false, false, res.failure});
    return res;
  }

  for (std::size_t horizon : config.checkpoints) {
    const Trajectory prefix = traj.prefix(horizon);
    for (auto& tr : res.traces) {
      CheckpointError pt;
      pt.horizon = horizon;
      try {
        const EstimatorResult fitted = fit(tr.method, prefix);
        pt.error = frobenius_distance(fitted.a_hat, spec.a_star);
        pt.converged = fitted.converged;
        pt.non_unique = fitted.non_unique;
      } catch (const std::exception& e) {
        pt.error = std::numeric_limits<double>::quiet_NaN();
        pt.failure = e.what();
      }
      tr.points.push_back(std::move(pt));
    }
  }
  for (auto& tr : res.traces) {
    std::vector<double> errs;
    for (const auto& pt : tr.points) errs.push_back(pt.error);
    tr.recovery_time = recovery_time(config.checkpoints, errs, config.recovery_tol);
  }
  res.attacks = attack_stats(traj);
  if (config.certify_small && config.d <= 3) {
    try {
      res.certificate = certify(traj);
    } catch (const std::exception&) {
      res.certificate.reset();
    }
  }
  return res;
}

namespace {

template <typename Job>
void run_jobs(std::size_t count, bool parallel, Job&& job) {
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(count); ++k) job(static_cast<std::size_t>(k));
  } else {
    for (std::size_t k = 0; k < count; ++k) job(k);
  }
}

RecoveryReport run_experiment_impl(const ExperimentConfig& config, bool parallel) {
  config.validate();
  RecoveryReport report;
  report.config = config;
  report.trials.resize(config.trials);
  run_jobs(config.trials, parallel, [&](std::size_t k) { report.trials[k] = error_trace(config, k); });
  return report;
}

}  // namespace

RecoveryReport run_experiment(const ExperimentConfig& config) { return run_experiment_impl(config, true); }

RecoveryReport run_experiment_serial(const ExperimentConfig& config) {
  return run_experiment_impl(config, false);
}

std::optional<double> recovery_quantile(std::span<const std::optional<std::size_t>> times, double q) {
  if (times.empty()) return std::nullopt;
  std::vector<double> v;
  v.reserve(times.size());
  for (const auto& t : times)
    v.push_back(t ? static_cast<double>(*t) : std::numeric_limits<double>::infinity());
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  if (!std::isfinite(v[hi])) return std::nullopt;
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

RecoverySummary summarize(std::span<const std::optional<std::size_t>> times) {
  RecoverySummary s;
  s.times.assign(times.begin(), times.end());
  s.median = recovery_quantile(times, 0.5);
  s.q1 = recovery_quantile(times, 0.25);
  s.q3 = recovery_quantile(times, 0.75);
  const auto ok = std::count_if(times.begin(), times.end(), [](const auto& t) { return t.has_value(); });
  s.recovered_fraction = times.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(times.size());
  s.never_recovered = ok == 0;
  return s;
}

const RecoverySummary& SweepCell::summary(Method m) const {
  for (const auto& [method, s] : summaries)
    if (method == m) return s;
  throw InvalidInput("sweep cell has no summary for estimator " + to_string(m));
}

SweepTable sweep(const ExperimentConfig& base, std::span<const double> p_values,
                 std::span<const std::size_t> d_values) {
  if (p_values.empty() || d_values.empty()) throw InvalidInput("sweep: grids must be nonempty");
  SweepTable table;
  for (double p : p_values) {
    for (std::size_t d : d_values) {
      SweepCell cell;
      cell.p = p;
      cell.d = d;
      cell.report.config = base;
      cell.report.config.model.p = p;
      cell.report.config.d = d;
      if (base.fixed_system && base.fixed_system->dim() != d) cell.report.config.fixed_system.reset();
      cell.report.config.validate();
      cell.report.trials.resize(base.trials);
      table.cells.push_back(std::move(cell));
    }
  }
  const std::size_t trials = base.trials;
  run_jobs(table.cells.size() * trials, true, [&](std::size_t job) {
    auto& cell = table.cells[job / trials];
    cell.report.trials[job % trials] = error_trace(cell.report.config, job % trials);
  });
  for (auto& cell : table.cells) {
    for (Method m : base.estimators) {
      std::vector<std::optional<std::size_t>> times;
      for (const auto& t : cell.report.trials) {
        const auto* tr = t.trace(m);
        times.push_back(tr ? tr->recovery_time : std::nullopt);
      }
      cell.summaries.emplace_back(m, summarize(times));
    }
  }
  return table;
}

}  // namespace advsysid
