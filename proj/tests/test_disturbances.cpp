#include <doctest.h>

#include <cmath>

#include "advsysid/disturbances.hpp"
#include "advsysid/errors.hpp"

using namespace advsysid;

namespace {

std::vector<Vector> probes(std::size_t d) {
  std::vector<Vector> out;
  Rng rng(99);
  std::normal_distribution<double> n(0.0, 3.0);
  out.push_back(Vector(d, 0.0));
  for (int k = 0; k < 3; ++k) {
    Vector x(d);
    for (auto& v : x) v = n(rng);
    out.push_back(x);
  }
  return out;
}

}  // namespace

TEST_CASE("sgn maps zero to +1") {
  CHECK(sgn(0.0) == 1.0);
  CHECK(sgn(-0.0) == 1.0);
  CHECK(sgn(-2.5) == -1.0);
  CHECK(sgn(1e-300) == 1.0);
}

TEST_CASE("kind names round trip") {
  for (auto k : {DisturbanceKind::Zero, DisturbanceKind::IidGaussian, DisturbanceKind::SignRestricted,
                 DisturbanceKind::ArbitraryNoncentral, DisturbanceKind::ScriptedAdversary}) {
    CHECK(disturbance_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(disturbance_kind_from_string("laplace"), InvalidInput);
}

TEST_CASE("model validation") {
  auto m = example1_model(0.7);
  m.p = 1.5;
  CHECK_THROWS_AS(m.validate(), InvalidInput);
  m = example1_model(0.7);
  m.sign_restricted.neg_hi = 0.5;
  CHECK_THROWS_AS(m.validate(), InvalidInput);
  CHECK_THROWS_AS(iid_gaussian_model(0.5, 0.0, -1.0), InvalidInput);
  CHECK_THROWS_AS(example2_model(-0.1), InvalidInput);
}

TEST_CASE("zero model never attacks") {
  Rng rng(1);
  const auto m = zero_model();
  for (int k = 0; k < 100; ++k) {
    const auto s = sample(m, Vector{1.0, -2.0}, rng);
    CHECK_FALSE(s.is_attack);
    CHECK(s.w == Vector{0.0, 0.0});
  }
}

TEST_CASE("quiet steps have zero disturbance") {
  Rng rng(2);
  const auto m = example1_model(0.3);
  for (int k = 0; k < 2000; ++k) {
    const auto s = sample(m, Vector{0.4, -0.1, 0.0}, rng);
    if (!s.is_attack) CHECK(s.w == Vector{0.0, 0.0, 0.0});
  }
}

TEST_CASE("example1 values oppose the state sign with gamma in the mixture support") {
  Rng rng(3);
  const auto m = example1_model(1.0);
  const Vector x{1.5, -0.2, 0.0, -7.0};
  for (int k = 0; k < 5000; ++k) {
    const Vector w = draw_attack_value(m, x, rng);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double gamma = -w[i] / sgn(x[i]);
      const bool in_neg = gamma >= -3.0 && gamma <= -1.0;
      const bool in_pos = gamma >= 10.0 && gamma <= 20.0;
      CHECK((in_neg || in_pos));
    }
  }
}

TEST_CASE("example1 sign factors") {
  Rng rng(4);
  const auto m = example1_model(1.0);
  const Vector x{2.0, -1.0, 0.0};
  for (int k = 0; k < 2000; ++k) {
    const auto f = draw_sign_factors(m, x, rng);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(std::abs(f.alpha[i]) == 1.0);
      CHECK(f.beta[i] > 0.0);
      CHECK(f.beta[i] <= m.beta_bound);
    }
  }
}

TEST_CASE("shared gamma uses one draw for all coordinates") {
  Rng rng(5);
  auto m = example1_model(1.0);
  m.sign_restricted.shared_gamma = true;
  const Vector x{1.0, -1.0, 2.0};
  for (int k = 0; k < 100; ++k) {
    const Vector w = draw_attack_value(m, x, rng);
    CHECK(w[0] == doctest::Approx(-w[1]));
    CHECK(w[0] == doctest::Approx(w[2]));
  }
}

TEST_CASE("example2 moments match N(100(sgn(x)+2), 5)") {
  Rng rng(6);
  const auto m = example2_model(1.0);
  const Vector x{1.0, -1.0, 0.0};
  const std::size_t n = 100000;
  Vector sum(3, 0.0), sq(3, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const Vector w = draw_attack_value(m, x, rng);
    for (std::size_t i = 0; i < 3; ++i) {
      sum[i] += w[i];
      sq[i] += w[i] * w[i];
    }
  }
  const Vector mean_expected{300.0, 100.0, 300.0};
  for (std::size_t i = 0; i < 3; ++i) {
    const double mean = sum[i] / n;
    const double var = sq[i] / n - mean * mean;
    CHECK(std::abs(mean - mean_expected[i]) <= 4.0 * std::sqrt(5.0 / n));
    // Var of the sample variance of a Gaussian is 2σ⁴/n.
    CHECK(std::abs(var - 5.0) <= 4.0 * std::sqrt(2.0 * 25.0 / n) + 1e-6);
  }
}

TEST_CASE("iid gaussian moments") {
  Rng rng(7);
  const auto m = iid_gaussian_model(1.0, 0.5, 2.0);
  const std::size_t n = 100000;
  double sum = 0.0, sq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = draw_attack_value(m, Vector{3.0}, rng)[0];
    sum += w;
    sq += w * w;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean - 0.5) <= 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(sq / n - mean * mean - 2.0) <= 4.0 * std::sqrt(8.0 / n));
}

TEST_CASE("remark1 rule") {
  Rng rng(8);
  const auto m = remark1_model();
  CHECK(m.p == 1.0);
  CHECK(m.required_dim == 1);
  CHECK(draw_attack_value(m, Vector{0.5}, rng) == Vector{-1.0});
  CHECK(draw_attack_value(m, Vector{-0.5}, rng) == Vector{1.0});
  CHECK(draw_attack_value(m, Vector{0.0}, rng) == Vector{-1.0});
}

TEST_CASE("sampling is reproducible from the seed") {
  const auto m = example2_model(0.5);
  Rng a(42), b(42);
  for (int k = 0; k < 100; ++k) {
    const auto sa = sample(m, Vector{1.0, -1.0}, a);
    const auto sb = sample(m, Vector{1.0, -1.0}, b);
    CHECK(sa.is_attack == sb.is_attack);
    CHECK(sa.w == sb.w);
  }
}

TEST_CASE("attack frequency within 4 sigma for every preset") {
  const std::size_t n = 100000;
  struct Case {
    DisturbanceModel model;
    std::size_t d;
  };
  const std::vector<Case> cases{{example1_model(0.7), 10}, {example2_model(0.47), 10},
                                {remark1_model(), 1},      {iid_gaussian_model(1.0), 10},
                                {example1_model(0.25), 3}, {iid_gaussian_model(0.5), 2}};
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto& c = cases[k];
    const double p = c.model.p;
    const double f = attack_frequency(c.model, Vector(c.d, 0.3), n, 1000 + k);
    CHECK(std::abs(f - p) <= 4.0 * std::sqrt(p * (1.0 - p) / n) + 1e-12);
  }
}

TEST_CASE("example1 symmetry audit holds at 3 sigma") {
  const std::size_t n = 100000;
  const auto audit = symmetry_audit(example1_model(0.7), probes(10), n, 11);
  CHECK(audit.max_deviation <= 3.0 / std::sqrt(static_cast<double>(n)));
  for (const auto& row : audit.frequencies)
    for (const auto& f : row) CHECK(f.freq_zero == 0.0);
}

TEST_CASE("example2 fails the symmetry audit") {
  const auto audit = symmetry_audit(example2_model(0.5), probes(4), 1000, 12);
  CHECK(audit.max_deviation > 0.9);
}

TEST_CASE("nondegeneracy probe") {
  CHECK(nondegeneracy_probe(example2_model(0.47), probes(10), 100000, 13) >= 4.5);
  CHECK(nondegeneracy_probe(iid_gaussian_model(1.0), probes(3), 20000, 14) > 0.8);
  CHECK_THROWS_AS(nondegeneracy_probe(example2_model(0.47), probes(2), 10, 1), InvalidInput);
}
