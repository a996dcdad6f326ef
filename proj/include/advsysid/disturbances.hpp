#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "advsysid/linalg.hpp"
#include "advsysid/rng.hpp"

namespace advsysid {

enum class DisturbanceKind { Zero, IidGaussian, SignRestricted, ArbitraryNoncentral, ScriptedAdversary };

std::string to_string(DisturbanceKind kind);
DisturbanceKind disturbance_kind_from_string(const std::string& name);

/// sgn with the sgn(0) := +1 convention.
constexpr double sgn(double v) noexcept { return v < 0.0 ? -1.0 : 1.0; }

/// Attack value rule for ScriptedAdversary: maps the current state to w.
using ScriptedRule = std::function<Vector(std::span<const double> x, Rng& rng)>;

struct GaussianParams {
  double mean = 0.0;
  double variance = 1.0;
};

/// w^i = -sgn(x^i)·γ with γ ~ ½·U[neg_lo, neg_hi] + ½·U[pos_lo, pos_hi],
/// neg_* < 0 < pos_*. In α∘β form: α^i = sgn(w^i), β^i = |γ| ∈ (0, B].
struct SignRestrictedParams {
  double neg_lo = -3.0;
  double neg_hi = -1.0;
  double pos_lo = 10.0;
  double pos_hi = 20.0;
  bool shared_gamma = false;  // one γ per step instead of one per coordinate
};

/// w^i ~ N(scale·(sgn(x^i) + offset), variance), independent across coordinates.
struct NoncentralParams {
  double scale = 100.0;
  double offset = 2.0;
  double variance = 5.0;
};

/// A stochastic attack policy. Immutable after construction.
struct DisturbanceModel {
  DisturbanceKind kind = DisturbanceKind::Zero;
  double p = 0.0;
  double declared_sigma_w = 1.0;
  double declared_lambda = 0.0;
  double beta_bound = 0.0;
  std::size_t required_dim = 0;  // 0: any dimension
  std::string label;

  GaussianParams gaussian;
  SignRestrictedParams sign_restricted;
  NoncentralParams noncentral;
  ScriptedRule scripted;

  /// Throws InvalidInput if an invariant is broken.
  void validate() const;
};

struct DisturbanceSample {
  Vector w;
  bool is_attack = false;
};

/// α∘β decomposition of a SignRestricted attack.
struct SignFactors {
  Vector alpha;
  Vector beta;
};

/// One Bernoulli(p) draw for the whole vector.
bool draw_attack(const DisturbanceModel& model, Rng& rng);

/// Attack-conditioned value at state x.
Vector draw_attack_value(const DisturbanceModel& model, std::span<const double> x, Rng& rng);

/// SignRestricted only: the value together with its α and β factors.
SignFactors draw_sign_factors(const DisturbanceModel& model, std::span<const double> x, Rng& rng);

DisturbanceSample sample(const DisturbanceModel& model, std::span<const double> x, Rng& rng);

DisturbanceModel zero_model();
DisturbanceModel iid_gaussian_model(double p, double mean = 0.0, double variance = 1.0);
DisturbanceModel example1_model(double p);
DisturbanceModel example2_model(double p);
DisturbanceModel remark1_model();
DisturbanceModel scripted_model(double p, ScriptedRule rule, std::string label,
                                std::size_t required_dim = 0);

struct SignFrequencies {
  double freq_pos = 0.0;
  double freq_neg = 0.0;
  double freq_zero = 0.0;
};

struct SymmetryAudit {
  /// [probe][coordinate]
  std::vector<std::vector<SignFrequencies>> frequencies;
  double max_deviation = 0.0;  // max |freq_pos − freq_neg|
};

/// Sign frequencies of attack-conditioned draws at each probe state.
SymmetryAudit symmetry_audit(const DisturbanceModel& model, const std::vector<Vector>& probe_states,
                             std::size_t n, std::uint64_t seed);

/// min over probes of λ_min of the empirical E[(x+w)(x+w)ᵀ | attack].
double nondegeneracy_probe(const DisturbanceModel& model, const std::vector<Vector>& probe_states,
                           std::size_t n, std::uint64_t seed);

/// Fraction of `n` draws flagged as attacks.
double attack_frequency(const DisturbanceModel& model, std::span<const double> x, std::size_t n,
                        std::uint64_t seed);

}  // namespace advsysid
