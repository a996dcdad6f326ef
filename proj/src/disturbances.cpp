#include "advsysid/disturbances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "advsysid/errors.hpp"

namespace advsysid {

std::string to_string(DisturbanceKind kind) {
  switch (kind) {
    case DisturbanceKind::Zero: return "zero";
    case DisturbanceKind::IidGaussian: return "iid_gaussian";
    case DisturbanceKind::SignRestricted: return "sign_restricted";
    case DisturbanceKind::ArbitraryNoncentral: return "arbitrary_noncentral";
    case DisturbanceKind::ScriptedAdversary: return "scripted";
  }
  return "unknown";
}

DisturbanceKind disturbance_kind_from_string(const std::string& name) {
  if (name == "zero") return DisturbanceKind::Zero;
  if (name == "iid_gaussian") return DisturbanceKind::IidGaussian;
  if (name == "sign_restricted") return DisturbanceKind::SignRestricted;
  if (name == "arbitrary_noncentral") return DisturbanceKind::ArbitraryNoncentral;
  if (name == "scripted") return DisturbanceKind::ScriptedAdversary;
  throw InvalidInput("unknown disturbance kind '" + name + "'");
}

void DisturbanceModel::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("disturbance: p must lie in [0, 1]");
  if (!(declared_sigma_w > 0.0)) throw InvalidInput("disturbance: declared_sigma_w must be positive");
  if (!(declared_lambda >= 0.0)) throw InvalidInput("disturbance: declared_lambda must be >= 0");
  switch (kind) {
    case DisturbanceKind::IidGaussian:
      if (!(gaussian.variance >= 0.0)) throw InvalidInput("disturbance: variance must be >= 0");
      break;
    case DisturbanceKind::SignRestricted: {
      const auto& s = sign_restricted;
      if (!(s.neg_lo <= s.neg_hi && s.neg_hi < 0.0 && 0.0 < s.pos_lo && s.pos_lo <= s.pos_hi)) {
        throw InvalidInput("disturbance: sign_restricted ranges need neg_lo <= neg_hi < 0 < pos_lo <= pos_hi");
      }
      if (!(beta_bound > 0.0)) throw InvalidInput("disturbance: beta_bound must be positive");
      break;
    }
    case DisturbanceKind::ArbitraryNoncentral:
      if (!(noncentral.variance >= 0.0)) throw InvalidInput("disturbance: variance must be >= 0");
      break;
    case DisturbanceKind::ScriptedAdversary:
      if (!scripted) throw InvalidInput("disturbance: scripted model without a rule");
      break;
    case DisturbanceKind::Zero:
      break;
  }
}

bool draw_attack(const DisturbanceModel& model, Rng& rng) {
  // Always consume one variate so attack sets are nested across p under a
  // shared stream.
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double draw = u(rng);
  return draw < model.p;
}

namespace {

void check_dim(const DisturbanceModel& model, std::span<const double> x) {
  if (model.required_dim != 0 && x.size() != model.required_dim) {
    throw InvalidInput("disturbance model '" + model.label + "' requires dimension " +
                       std::to_string(model.required_dim) + ", got " + std::to_string(x.size()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw InvalidInput("disturbance: non-finite state");
  }
}

double draw_gamma(const SignRestrictedParams& s, Rng& rng) {
  std::bernoulli_distribution branch(0.5);
  if (branch(rng)) {
    std::uniform_real_distribution<double> u(s.pos_lo, s.pos_hi);
    return u(rng);
  }
  std::uniform_real_distribution<double> u(s.neg_lo, s.neg_hi);
  return u(rng);
}

}  // namespace

SignFactors draw_sign_factors(const DisturbanceModel& model, std::span<const double> x, Rng& rng) {
  if (model.kind != DisturbanceKind::SignRestricted) {
    throw InvalidInput("draw_sign_factors: model is not sign-restricted");
  }
  check_dim(model, x);
  const std::size_t d = x.size();
  SignFactors f{Vector(d), Vector(d)};
  double shared = model.sign_restricted.shared_gamma ? draw_gamma(model.sign_restricted, rng) : 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double gamma = model.sign_restricted.shared_gamma ? shared : draw_gamma(model.sign_restricted, rng);
    f.alpha[i] = -sgn(x[i]) * sgn(gamma);
    f.beta[i] = std::abs(gamma);
  }
  return f;
}

Vector draw_attack_value(const DisturbanceModel& model, std::span<const double> x, Rng& rng) {
  check_dim(model, x);
  const std::size_t d = x.size();
  Vector w(d, 0.0);
  switch (model.kind) {
    case DisturbanceKind::Zero:
      break;
    case DisturbanceKind::IidGaussian: {
      std::normal_distribution<double> n(model.gaussian.mean, std::sqrt(model.gaussian.variance));
      for (auto& v : w) v = n(rng);
      break;
    }
    case DisturbanceKind::SignRestricted: {
      const SignFactors f = draw_sign_factors(model, x, rng);
      for (std::size_t i = 0; i < d; ++i) w[i] = f.alpha[i] * f.beta[i];
      break;
    }
    case DisturbanceKind::ArbitraryNoncentral: {
      const auto& nc = model.noncentral;
      std::normal_distribution<double> n(0.0, std::sqrt(nc.variance));
      for (std::size_t i = 0; i < d; ++i) w[i] = nc.scale * (sgn(x[i]) + nc.offset) + n(rng);
      break;
    }
    case DisturbanceKind::ScriptedAdversary: {
      w = model.scripted(x, rng);
      if (w.size() != d) throw InvalidInput("scripted disturbance returned wrong dimension");
      break;
    }
  }
  return w;
}

DisturbanceSample sample(const DisturbanceModel& model, std::span<const double> x, Rng& rng) {
  check_dim(model, x);
  DisturbanceSample s;
  s.is_attack = draw_attack(model, rng);
  s.w = s.is_attack ? draw_attack_value(model, x, rng) : Vector(x.size(), 0.0);
  return s;
}

DisturbanceModel zero_model() {
  DisturbanceModel m;
  m.kind = DisturbanceKind::Zero;
  m.p = 0.0;
  m.label = "zero";
  return m;
}

DisturbanceModel iid_gaussian_model(double p, double mean, double variance) {
  DisturbanceModel m;
  m.kind = DisturbanceKind::IidGaussian;
  m.p = p;
  m.gaussian = {mean, variance};
  m.declared_sigma_w = std::max(std::sqrt(variance) + std::abs(mean), 1e-12);
  m.declared_lambda = std::sqrt(variance);
  m.label = "gaussian";
  m.validate();
  return m;
}

DisturbanceModel example1_model(double p) {
  DisturbanceModel m;
  m.kind = DisturbanceKind::SignRestricted;
  m.p = p;
  m.sign_restricted = SignRestrictedParams{};
  m.beta_bound = 20.0;
  m.declared_sigma_w = 20.0;
  m.declared_lambda = 0.0;
  m.label = "example1";
  m.validate();
  return m;
}

DisturbanceModel example2_model(double p) {
  DisturbanceModel m;
  m.kind = DisturbanceKind::ArbitraryNoncentral;
  m.p = p;
  m.noncentral = NoncentralParams{};
  m.declared_sigma_w = 300.0 + 3.0 * std::sqrt(5.0);
  m.declared_lambda = std::sqrt(5.0);
  m.label = "example2";
  m.validate();
  return m;
}

DisturbanceModel remark1_model() {
  auto rule = [](std::span<const double> x, Rng&) { return Vector{-sgn(x[0])}; };
  DisturbanceModel m = scripted_model(1.0, rule, "remark1", 1);
  m.declared_sigma_w = 1.0;
  return m;
}

DisturbanceModel scripted_model(double p, ScriptedRule rule, std::string label, std::size_t required_dim) {
  DisturbanceModel m;
  m.kind = DisturbanceKind::ScriptedAdversary;
  m.p = p;
  m.scripted = std::move(rule);
  m.label = std::move(label);
  m.required_dim = required_dim;
  m.validate();
  return m;
}

SymmetryAudit symmetry_audit(const DisturbanceModel& model, const std::vector<Vector>& probe_states,
                             std::size_t n, std::uint64_t seed) {
  if (n < 1000) throw InvalidInput("symmetry_audit: n must be at least 1000");
  SymmetryAudit audit;
  audit.frequencies.reserve(probe_states.size());
  for (std::size_t k = 0; k < probe_states.size(); ++k) {
    const Vector& x = probe_states[k];
    Rng rng(derive_seed(seed, k));
    std::vector<std::size_t> pos(x.size(), 0), neg(x.size(), 0), zero(x.size(), 0);
    const bool attacks_possible = model.p > 0.0 && model.kind != DisturbanceKind::Zero;
    for (std::size_t s = 0; s < n; ++s) {
      // Condition on the attack event directly.
      const Vector w = attacks_possible ? draw_attack_value(model, x, rng) : Vector(x.size(), 0.0);
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (w[i] > 0.0) ++pos[i];
        else if (w[i] < 0.0) ++neg[i];
        else ++zero[i];
      }
    }
    std::vector<SignFrequencies> row(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double nn = static_cast<double>(n);
      row[i] = {pos[i] / nn, neg[i] / nn, zero[i] / nn};
      audit.max_deviation = std::max(audit.max_deviation, std::abs(row[i].freq_pos - row[i].freq_neg));
    }
    audit.frequencies.push_back(std::move(row));
  }
  return audit;
}

double nondegeneracy_probe(const DisturbanceModel& model, const std::vector<Vector>& probe_states,
                           std::size_t n, std::uint64_t seed) {
  if (n < 1000) throw InvalidInput("nondegeneracy_probe: n must be at least 1000");
  if (probe_states.empty()) throw InvalidInput("nondegeneracy_probe: no probe states");
  double result = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < probe_states.size(); ++k) {
    const Vector& x = probe_states[k];
    const std::size_t d = x.size();
    Rng rng(derive_seed(seed, k));
    Matrix m(d, d);
    Vector v(d);
    for (std::size_t s = 0; s < n; ++s) {
      const Vector w = draw_attack_value(model, x, rng);
      for (std::size_t i = 0; i < d; ++i) v[i] = x[i] + w[i];
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) m(i, j) += v[i] * v[j];
    }
    m *= 1.0 / static_cast<double>(n);
    result = std::min(result, min_eig_sym(m));
  }
  return result;
}

double attack_frequency(const DisturbanceModel& model, std::span<const double> x, std::size_t n,
                        std::uint64_t seed) {
  if (n == 0) throw InvalidInput("attack_frequency: n must be positive");
  Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < n; ++s) hits += sample(model, x, rng).is_attack ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(n);
}

}  // namespace advsysid
