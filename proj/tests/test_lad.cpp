#include <doctest.h>

#include <cmath>
#include <random>

#include "advsysid/errors.hpp"
#include "advsysid/lad.hpp"
#include "oracles.hpp"

using namespace advsysid;

namespace {

struct Instance {
  Matrix x;
  Vector y;
};

Instance random_instance(std::size_t t, std::size_t d, std::mt19937_64& rng, double outlier_rate = 0.3) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Instance in{Matrix(t, d), Vector(t)};
  Vector a(d);
  for (auto& v : a) v = n(rng);
  for (std::size_t r = 0; r < t; ++r) {
    for (std::size_t c = 0; c < d; ++c) in.x(r, c) = n(rng);
    in.y[r] = dot(in.x.row(r), a) + 0.1 * n(rng) + (u(rng) < outlier_rate ? 20.0 * n(rng) : 0.0);
  }
  return in;
}

}  // namespace

TEST_CASE("scalar LAD equals the weighted median") {
  std::mt19937_64 rng(10);
  for (int k = 0; k < 1000; ++k) {
    const auto in = random_instance(5 + k % 60, 1, rng);
    const auto res = lad_row(in.x, in.y);
    const Vector col(in.x.entries().begin(), in.x.entries().end());
    const double expected = oracle::scalar_lad(col, in.y);
    CHECK(res.converged);
    CHECK(res.coef[0] == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("d = 2 LAD objective equals brute-force vertex enumeration") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 100; ++k) {
    const auto in = random_instance(6 + k % 40, 2, rng);
    const auto res = lad_row(in.x, in.y);
    CHECK(res.converged);
    CHECK(std::abs(res.objective - oracle::brute_force_lad2(in.x, in.y)) <= 1e-8);
    CHECK(res.objective == doctest::Approx(oracle::l1_objective(in.x, in.y, res.coef)).epsilon(1e-12));
  }
}

TEST_CASE("LAD returns a local minimum") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const std::size_t d = 1 + k % 6;
    const auto in = random_instance(40 + k, d, rng);
    const auto res = lad_row(in.x, in.y);
    for (int probe = 0; probe < 20; ++probe) {
      Vector a = res.coef;
      for (auto& v : a) v += 1e-4 * n(rng);
      CHECK(oracle::l1_objective(in.x, in.y, a) >= res.objective - 1e-9);
    }
  }
}

TEST_CASE("LAD vertex interpolates its basis") {
  std::mt19937_64 rng(13);
  const auto in = random_instance(50, 4, rng);
  const auto res = lad_row(in.x, in.y);
  REQUIRE(res.basis.size() == 4);
  for (auto t : res.basis) CHECK(std::abs(in.y[t] - dot(in.x.row(t), res.coef)) <= 1e-9 * (1.0 + std::abs(in.y[t])));
}

TEST_CASE("LAD recovers exactly under a minority of gross outliers") {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const std::size_t d = 2 + k % 5;
    const std::size_t t = 200;
    Matrix x(t, d);
    Vector a(d), y(t);
    for (auto& v : a) v = n(rng);
    for (std::size_t r = 0; r < t; ++r) {
      for (std::size_t c = 0; c < d; ++c) x(r, c) = n(rng);
      y[r] = dot(x.row(r), a) + (u(rng) < 0.2 ? 50.0 + 10.0 * u(rng) : 0.0);
    }
    const auto res = lad_row(x, y);
    for (std::size_t c = 0; c < d; ++c) CHECK(std::abs(res.coef[c] - a[c]) <= 1e-9);
    CHECK_FALSE(res.non_unique);
    CHECK(res.max_dual < 1.0);
  }
}

TEST_CASE("LAD is shift invariant") {
  std::mt19937_64 rng(15);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const std::size_t d = 1 + k % 4;
    auto in = random_instance(30, d, rng);
    const auto base = lad_row(in.x, in.y);
    Vector b(d);
    for (auto& v : b) v = n(rng);
    for (std::size_t r = 0; r < in.y.size(); ++r) in.y[r] += dot(in.x.row(r), b);
    const auto shifted = lad_row(in.x, in.y);
    if (base.non_unique) continue;
    for (std::size_t c = 0; c < d; ++c) CHECK(shifted.coef[c] == doctest::Approx(base.coef[c] + b[c]).epsilon(1e-8));
  }
}

TEST_CASE("moving an outlier further away does not change the fit") {
  std::mt19937_64 rng(16);
  for (int k = 0; k < 50; ++k) {
    const std::size_t d = 1 + k % 4;
    auto in = random_instance(40, d, rng);
    const auto base = lad_row(in.x, in.y);
    if (base.non_unique) continue;
    for (std::size_t r = 0; r < in.y.size(); ++r) {
      const double res = in.y[r] - dot(in.x.row(r), base.coef);
      if (std::abs(res) > 1e-6) in.y[r] += (res > 0.0 ? 100.0 : -100.0);
    }
    const auto moved = lad_row(in.x, in.y);
    for (std::size_t c = 0; c < d; ++c) CHECK(moved.coef[c] == doctest::Approx(base.coef[c]).epsilon(1e-8));
  }
}

TEST_CASE("non-unique minimizers are flagged") {
  const Matrix x{{1.0}, {1.0}};
  const Vector y{0.0, 1.0};
  const auto res = lad_row(x, y);
  CHECK(res.objective == doctest::Approx(1.0));
  CHECK(res.non_unique);
}

TEST_CASE("LAD input errors") {
  CHECK_THROWS_AS(lad_row(Matrix(1, 2, 1.0), Vector{1.0}), InvalidInput);
  CHECK_THROWS_AS(lad_row(Matrix(3, 1, 1.0), Vector{1.0, 2.0}), InvalidInput);
  const Matrix rank1{{1.0, 2.0}, {2.0, 4.0}, {3.0, 6.0}};
  CHECK_THROWS_AS(lad_row(rank1, Vector{1.0, 2.0, 4.0}), LpFailure);
}
