#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "advsysid/disturbances.hpp"
#include "advsysid/linalg.hpp"

namespace advsysid {

/// Ground truth x_{t+1} = A* x_t + w_t.
struct SystemSpec {
  Matrix a_star;
  Vector x0;

  std::size_t dim() const noexcept { return x0.size(); }
  /// Requires a square A* matching x0, finite entries and ‖A*‖₂ < 1.
  void validate() const;
};

struct Trajectory {
  std::vector<Vector> states;        // x_0..x_T
  std::vector<Vector> disturbances;  // w_0..w_{T-1}
  std::vector<bool> attack_flags;    // one per disturbance

  std::size_t horizon() const noexcept { return disturbances.size(); }
  std::size_t dim() const noexcept { return states.empty() ? 0 : states.front().size(); }

  /// First `steps` transitions (states x_0..x_steps).
  Trajectory prefix(std::size_t steps) const;
};

/// Standard-normal A* rescaled to the target operator norm, standard-normal x0.
SystemSpec random_system(std::size_t d, double target_norm, Rng& rng);
SystemSpec random_system(std::size_t d, double target_norm, std::uint64_t seed);

/// Rolls the recurrence forward T steps. Attack decisions and attack values
/// come from two independent streams derived from `seed`, so attack sets
/// are nested across p for a fixed seed.
Trajectory simulate(const SystemSpec& spec, const DisturbanceModel& model, std::size_t steps,
                    std::uint64_t seed);

struct AttackStats {
  std::size_t k_t_size = 0;  // number of attack steps
  std::size_t n_t = 0;       // quiet steps immediately preceded by an attack
};

AttackStats attack_stats(const Trajectory& traj);

/// Throws InvalidInput naming the first step where the stored disturbance
/// differs from states[t+1] − A*·states[t], or where flags and values disagree.
void audit_recurrence(const SystemSpec& spec, const Trajectory& traj);

// CSV layout: t, x_1..x_d, w_1..w_d, attack_flag. The final row (t = T)
// carries the terminal state with empty w and flag cells.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& is);
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::string& path);

}  // namespace advsysid
