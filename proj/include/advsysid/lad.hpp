#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "advsysid/linalg.hpp"

namespace advsysid {

struct LadOptions {
  /// Optimality tolerance on the dual variables and the relative threshold
  /// under which a residual counts as exactly zero.
  double tol = 1e-9;
  /// 0 selects 50·(T + d).
  std::size_t max_iterations = 0;
};

struct LadResult {
  Vector coef;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  /// Set when the optimal vertex has an edge of zero slope, i.e. the
  /// minimizer is not proven unique.
  bool non_unique = false;
  /// Largest |dual| over the final basis; < 1 certifies a unique minimizer.
  double max_dual = 0.0;
  /// Observation indices interpolated exactly by the returned vertex.
  std::vector<std::size_t> basis;
};

/// Exact least-absolute-deviations fit: minimizes Σ_t |y_t − x_tᵀa| where
/// x_t is row t of `regressors` (T×d).
///
/// Vertex-to-vertex descent (Barrodale–Roberts style) on the LP
///   min Σ (u_t + v_t)  s.t.  u_t − v_t = y_t − x_tᵀa,  u, v ≥ 0.
/// A vertex interpolates d observations; each pivot drops one of them along
/// the edge with the steepest dual violation and picks the entering
/// observation by a weighted-median line search over residual breakpoints.
/// Degenerate vertices (many zero residuals, the normal state at exact
/// recovery) are resolved by a symbolic lexicographic perturbation of the
/// targets, which makes every step strictly improving.
///
/// Throws InvalidInput when T < d, LpFailure when the regressors are rank
/// deficient or the descent breaks down numerically.
LadResult lad_row(const Matrix& regressors, std::span<const double> targets,
                  const LadOptions& options = {});

}  // namespace advsysid
