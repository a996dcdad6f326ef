#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "advsysid/dynamics.hpp"
#include "advsysid/errors.hpp"

using namespace advsysid;

TEST_CASE("random_system hits the target operator norm") {
  for (std::size_t d : {1u, 2u, 5u, 10u, 20u}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto spec = random_system(d, 0.6, seed);
      Eigen::MatrixXd a(d, d);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) a(i, j) = spec.a_star(i, j);
      CHECK(Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0) == doctest::Approx(0.6).epsilon(1e-8));
      CHECK(spec.x0.size() == d);
    }
  }
  CHECK_THROWS_AS(random_system(3, 1.0, 1), InvalidInput);
  CHECK_THROWS_AS(random_system(0, 0.5, 1), InvalidInput);
}

TEST_CASE("system validation") {
  SystemSpec s{Matrix{{1.0}}, {0.0}};
  CHECK_THROWS_AS(s.validate(), InvalidInput);
  s.a_star = Matrix{{0.5, 0.0}};
  CHECK_THROWS_AS(s.validate(), InvalidInput);
  CHECK_THROWS_AS(simulate(SystemSpec{Matrix{{1.2}}, {1.0}}, zero_model(), 5, 0), InvalidInput);
}

TEST_CASE("remark1 needs d = 1") {
  CHECK_THROWS_AS(simulate(random_system(2, 0.5, 1), remark1_model(), 10, 0), InvalidInput);
  const auto traj = simulate(SystemSpec{Matrix{{0.5}}, {0.5}}, remark1_model(), 4, 0);
  // x: 0.5 -> 0.25 - 1 = -0.75 -> -0.375 + 1 = 0.625 -> ...
  CHECK(traj.states[1][0] == -0.75);
  CHECK(traj.states[2][0] == 0.625);
  CHECK(traj.disturbances[2][0] == -1.0);
}

TEST_CASE("trajectories satisfy the recurrence exactly") {
  for (const auto& model : {example1_model(0.7), example2_model(0.45), iid_gaussian_model(1.0), zero_model()}) {
    const auto spec = random_system(4, 0.8, 3);
    const auto traj = simulate(spec, model, 500, 3);
    CHECK(traj.horizon() == 500);
    CHECK(traj.states.size() == 501);
    CHECK_NOTHROW(audit_recurrence(spec, traj));
    auto broken = traj;
    broken.states[10][1] += 1e-12;
    CHECK_THROWS_AS(audit_recurrence(spec, broken), InvalidInput);
  }
}

TEST_CASE("zero disturbance decays geometrically") {
  const auto spec = random_system(6, 0.7, 9);
  const auto traj = simulate(spec, zero_model(), 200, 9);
  const double x0 = norm2(spec.x0);
  for (std::size_t t = 0; t <= 200; ++t) {
    CHECK(norm2(traj.states[t]) <= std::pow(0.7, static_cast<double>(t)) * x0 * (1.0 + 1e-9) + 1e-300);
  }
}

TEST_CASE("replay determinism and seed sensitivity") {
  const auto spec = random_system(3, 0.5, 1);
  const auto a = simulate(spec, example2_model(0.5), 300, 77);
  const auto b = simulate(spec, example2_model(0.5), 300, 77);
  const auto c = simulate(spec, example2_model(0.5), 300, 78);
  CHECK(a.states == b.states);
  CHECK(a.attack_flags == b.attack_flags);
  CHECK(a.states != c.states);
}

TEST_CASE("prefix consistency") {
  const auto spec = random_system(3, 0.6, 2);
  const auto longer = simulate(spec, example1_model(0.7), 1000, 5);
  const auto shorter = simulate(spec, example1_model(0.7), 400, 5);
  const auto p = longer.prefix(400);
  CHECK(p.states == shorter.states);
  CHECK(p.disturbances == shorter.disturbances);
  CHECK(p.attack_flags == shorter.attack_flags);
  CHECK_THROWS_AS(longer.prefix(1001), InvalidInput);
}

TEST_CASE("attack sets are nested across p for a fixed seed") {
  const auto spec = random_system(3, 0.6, 4);
  const auto lo = simulate(spec, example1_model(0.6), 2000, 8);
  const auto hi = simulate(spec, example1_model(0.8), 2000, 8);
  for (std::size_t t = 0; t < 2000; ++t)
    if (lo.attack_flags[t]) CHECK(hi.attack_flags[t]);
}

TEST_CASE("attack_stats counts attacks and attack-to-quiet transitions") {
  Trajectory traj;
  traj.attack_flags = {true, false, true, true, false, false, true};
  traj.disturbances.assign(7, Vector{0.0});
  traj.states.assign(8, Vector{0.0});
  const auto s = attack_stats(traj);
  CHECK(s.k_t_size == 4);
  CHECK(s.n_t == 2);
}

TEST_CASE("trajectory CSV round trip is exact") {
  const auto traj = simulate(random_system(3, 0.9, 6), example2_model(0.5), 50, 6);
  std::stringstream ss;
  write_trajectory_csv(ss, traj);
  const std::string text = ss.str();
  CHECK(text.rfind("t,x_1,x_2,x_3,w_1,w_2,w_3,attack_flag\n", 0) == 0);
  const auto back = read_trajectory_csv(ss);
  CHECK(back.states == traj.states);
  CHECK(back.disturbances == traj.disturbances);
  CHECK(back.attack_flags == traj.attack_flags);
}

TEST_CASE("trajectory CSV rejects malformed input") {
  std::stringstream bad_header("t,x_1,y_1,attack_flag\n0,1,2,0\n");
  try {
    read_trajectory_csv(bad_header);
    FAIL("expected InvalidInput");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("w_1") != std::string::npos);
  }
  std::stringstream bad_value("t,x_1,w_1,attack_flag\n0,abc,1,1\n1,2,,\n");
  CHECK_THROWS_AS(read_trajectory_csv(bad_value), InvalidInput);
  std::stringstream empty("");
  CHECK_THROWS_AS(read_trajectory_csv(empty), InvalidInput);
}
