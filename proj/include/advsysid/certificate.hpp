#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "advsysid/dynamics.hpp"
#include "advsysid/linalg.hpp"

namespace advsysid {

/// Finite subset of the unit sphere S^{d-1} with a covering guarantee.
struct NetSpec {
  std::size_t d = 0;
  double epsilon = 0.0;          // requested covering radius
  double covering_radius = 0.0;  // radius actually guaranteed (≤ epsilon)
  std::vector<Vector> points;
};

/// Upper bound (1 + 2/ε)^d on the size of an ε-net of S^{d-1}.
double net_size_bound(std::size_t d, double epsilon);

/// Smallest ε whose net_size_bound stays within the construction budget.
double min_feasible_epsilon(std::size_t d);

inline constexpr double kNetBudget = 1e7;

/// d = 1: {+1, −1}. d = 2: uniform angular grid. d = 3: Fibonacci sphere,
/// densified until a sampled covering check passes with 10% slack.
/// Throws NetTooLarge when (1 + 2/ε)^d > 1e7 or d > 3.
NetSpec build_net(std::size_t d, double epsilon);

/// Σ_t z_t^i(y) with z = |yᵀx_t| on quiet steps for coordinate i and
/// sgn(w_t^i)·yᵀx_t otherwise. `i` is 0-based. Requires ‖y‖₂ = 1 ± 1e-9.
double z_sum(const Trajectory& traj, std::size_t i, std::span<const double> y);

/// Σ_{t<T} ‖x_t‖₂, the Lipschitz constant of y ↦ z_sum(y).
double lipschitz_bound(const Trajectory& traj);

enum class CertifyMode { Exact, Sampled };

struct CertifyOptions {
  CertifyMode mode = CertifyMode::Exact;
  /// Exact mode: requested covering radius; empty selects it from the
  /// trajectory (coarse pass, then up to two refinements).
  std::optional<double> epsilon;
  std::size_t samples = 1000;  // sampled mode
  std::uint64_t seed = 0;      // sampled mode
};

struct CertificateReport {
  CertifyMode mode = CertifyMode::Exact;
  bool certified = false;
  std::vector<double> per_coordinate_min;
  double lipschitz_bound = 0.0;
  double epsilon = 0.0;
  double covering_radius = 0.0;
  std::size_t net_size = 0;
  /// Exact: min_i per_coordinate_min − covering_radius·lipschitz_bound.
  /// Sampled: min_i per_coordinate_min (evidence only, no slack).
  double margin = 0.0;
};

/// Sufficient check that A* is the unique minimizer of the l1 objective on
/// `traj`: positivity of every z_sum over a net plus Lipschitz slack proves
/// positivity on the whole sphere. Sampled mode never certifies.
CertificateReport certify(const Trajectory& traj, const CertifyOptions& options = {});

/// Per-coordinate minimum of z_sum over `points` (OpenMP over points).
std::vector<double> min_z_over(const Trajectory& traj, const std::vector<Vector>& points);
/// Single-threaded reference for min_z_over.
std::vector<double> min_z_over_serial(const Trajectory& traj, const std::vector<Vector>& points);

std::string to_string(CertifyMode mode);

}  // namespace advsysid
