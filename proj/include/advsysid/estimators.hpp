#pragma once

#include <cstddef>
#include <string>

#include "advsysid/dynamics.hpp"
#include "advsysid/lad.hpp"
#include "advsysid/linalg.hpp"

namespace advsysid {

enum class Method { Ols, L2Norm, L1Norm };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

struct EstimatorResult {
  Matrix a_hat;
  double objective = 0.0;
  Method method = Method::Ols;
  std::size_t iterations = 0;
  bool converged = false;
  double tol = 0.0;
  bool non_unique = false;  // l1 only: some row minimizer not proven unique
};

/// Regression view of a trajectory: row t of `regressors` is x_t and row t
/// of `targets` is x_{t+1}.
struct RegressionData {
  Matrix regressors;
  Matrix targets;
};

RegressionData regression_data(const Trajectory& traj);

/// Loss functions evaluated at an arbitrary candidate matrix.
double ols_loss(const Trajectory& traj, const Matrix& a);
double l2norm_loss(const Trajectory& traj, const Matrix& a);
double l1_loss(const Trajectory& traj, const Matrix& a);
double loss(Method m, const Trajectory& traj, const Matrix& a);

/// Closed-form least squares. Throws InsufficientExcitation when the Gram
/// matrix Σ x_t x_tᵀ is singular.
EstimatorResult fit_ols(const Trajectory& traj);

/// Sum of unsquared residual norms via smoothed IRLS.
EstimatorResult fit_l2norm(const Trajectory& traj, double tol = 1e-8);

/// Row-decoupled exact LAD. Rows are solved in parallel (OpenMP) and merged
/// by row index; failures are rethrown annotated with the row.
EstimatorResult fit_l1(const Trajectory& traj, double tol = 1e-9);

/// Single-threaded reference for fit_l1; bit-identical output.
EstimatorResult fit_l1_serial(const Trajectory& traj, double tol = 1e-9);

EstimatorResult fit(Method m, const Trajectory& traj);

}  // namespace advsysid
