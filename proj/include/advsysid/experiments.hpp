#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "advsysid/certificate.hpp"
#include "advsysid/disturbances.hpp"
#include "advsysid/dynamics.hpp"
#include "advsysid/estimators.hpp"

namespace advsysid {

std::vector<std::size_t> default_checkpoints();

struct ExperimentConfig {
  std::size_t d = 10;
  double target_norm = 0.6;
  DisturbanceModel model;
  std::vector<std::size_t> checkpoints = default_checkpoints();
  std::size_t trials = 10;
  double recovery_tol = 1e-6;
  double confidence_delta = 0.1;
  std::uint64_t master_seed = 0;
  std::vector<Method> estimators{Method::Ols, Method::L2Norm, Method::L1Norm};
  /// Certify the final trajectory of each trial when d ≤ 3.
  bool certify_small = true;
  /// Use this system in every trial instead of drawing one per trial.
  std::optional<SystemSpec> fixed_system;

  void validate() const;
};

struct CheckpointError {
  std::size_t horizon = 0;
  double error = 0.0;  // Frobenius distance to A*; NaN when the fit failed
  bool converged = false;
  bool non_unique = false;
  std::string failure;
};

struct EstimatorTrace {
  Method method = Method::Ols;
  std::vector<CheckpointError> points;
  std::optional<std::size_t> recovery_time;
};

struct TrialResult {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::vector<EstimatorTrace> traces;  // in config.estimators order
  AttackStats attacks;                 // at the final checkpoint
  std::optional<CertificateReport> certificate;
  std::string failure;                 // set when the trial could not run

  const EstimatorTrace* trace(Method m) const;
};

struct RecoveryReport {
  ExperimentConfig config;
  std::vector<TrialResult> trials;

  std::size_t failure_count() const;
  /// Fraction of trials whose estimator recovered by the last checkpoint.
  double recovery_rate(Method m) const;
};

/// First checkpoint from which every later error stays below `tol`.
std::optional<std::size_t> recovery_time(std::span<const std::size_t> horizons,
                                         std::span<const double> errors, double tol);

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial_index);

/// The system and trajectory a trial runs on (to max checkpoint).
SystemSpec trial_system(const ExperimentConfig& config, std::size_t trial_index);
Trajectory trial_trajectory(const ExperimentConfig& config, std::size_t trial_index);

/// One trial: simulate to the last checkpoint, fit every estimator on each
/// prefix and record the Frobenius error. Fit failures are recorded per
/// checkpoint; the trace continues.
TrialResult error_trace(const ExperimentConfig& config, std::size_t trial_index);

/// All trials, run in parallel and merged by trial index.
RecoveryReport run_experiment(const ExperimentConfig& config);
/// Single-threaded reference for run_experiment.
RecoveryReport run_experiment_serial(const ExperimentConfig& config);

struct RecoverySummary {
  std::vector<std::optional<std::size_t>> times;  // per trial
  std::optional<double> median;                   // none when ≥ half never recover
  std::optional<double> q1;
  std::optional<double> q3;
  double recovered_fraction = 0.0;
  bool never_recovered = false;
};

/// Quantile over recovery times with "never" ranked above every checkpoint.
std::optional<double> recovery_quantile(std::span<const std::optional<std::size_t>> times, double q);
RecoverySummary summarize(std::span<const std::optional<std::size_t>> times);

struct SweepCell {
  double p = 0.0;
  std::size_t d = 0;
  RecoveryReport report;
  std::vector<std::pair<Method, RecoverySummary>> summaries;

  const RecoverySummary& summary(Method m) const;
};

struct SweepTable {
  std::vector<SweepCell> cells;  // p-major, then d
};

/// Every (p, d) cell of the grid with `base.trials` trials each. The model
/// keeps its kind and parameters; only p changes per cell. Trial seeds do
/// not depend on the cell, so cells share attack randomness.
SweepTable sweep(const ExperimentConfig& base, std::span<const double> p_values,
                 std::span<const std::size_t> d_values);

}  // namespace advsysid
