#include <doctest.h>

#include <cmath>
#include <limits>

#include "advsysid/errors.hpp"
#include "advsysid/experiments.hpp"

using namespace advsysid;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.d = 3;
  c.model = example1_model(0.7);
  c.checkpoints = {50, 100, 200, 400};
  c.trials = 4;
  c.master_seed = 17;
  return c;
}

const double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

TEST_CASE("recovery_time is the first checkpoint of the final sub-tolerance run") {
  const std::vector<std::size_t> h{1, 2, 3, 4, 5};
  CHECK(recovery_time(h, std::vector<double>{1, 1e-7, 1, 1e-7, 1e-8}, 1e-6) == 4u);
  CHECK(recovery_time(h, std::vector<double>{1e-9, 1e-9, 1e-9, 1e-9, 1e-9}, 1e-6) == 1u);
  CHECK_FALSE(recovery_time(h, std::vector<double>{1e-9, 1e-9, 1e-9, 1e-9, 1}, 1e-6).has_value());
  CHECK(recovery_time(h, std::vector<double>{1e-9, kNaN, 1e-9, 1e-9, 1e-9}, 1e-6) == 3u);
  CHECK_THROWS_AS(recovery_time(h, std::vector<double>{1.0}, 1e-6), InvalidInput);
}

TEST_CASE("recovery quantiles rank never above every checkpoint") {
  using T = std::optional<std::size_t>;
  const std::vector<T> a{100, 200, std::nullopt};
  CHECK(recovery_quantile(a, 0.5) == doctest::Approx(200.0));
  const std::vector<T> b{100, std::nullopt, std::nullopt};
  CHECK_FALSE(recovery_quantile(b, 0.5).has_value());
  const std::vector<T> c{400, 100, 300, 200};
  CHECK(*recovery_quantile(c, 0.25) == doctest::Approx(175.0));
  CHECK(*recovery_quantile(c, 0.5) == doctest::Approx(250.0));
  const auto s = summarize(a);
  CHECK(s.recovered_fraction == doctest::Approx(2.0 / 3.0));
  CHECK_FALSE(s.never_recovered);
  CHECK(summarize(std::vector<T>{std::nullopt}).never_recovered);
}

TEST_CASE("experiment config validation") {
  auto c = small_config();
  c.estimators.clear();
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c = small_config();
  c.checkpoints = {100, 100};
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c = small_config();
  c.trials = 0;
  CHECK_THROWS_AS(run_experiment(c), InvalidInput);
}

TEST_CASE("every trace has one point per checkpoint") {
  const auto rep = run_experiment(small_config());
  REQUIRE(rep.trials.size() == 4);
  for (const auto& t : rep.trials) {
    CHECK(t.traces.size() == 3);
    for (const auto& tr : t.traces) CHECK(tr.points.size() == 4);
    CHECK(t.certificate.has_value());
    CHECK(t.attacks.k_t_size > 0);
  }
  CHECK(rep.failure_count() == 0);
  CHECK(rep.recovery_rate(Method::L1Norm) == doctest::Approx(1.0));
  CHECK(rep.recovery_rate(Method::Ols) == doctest::Approx(0.0));
}

TEST_CASE("parallel and serial experiments agree") {
  const auto a = run_experiment(small_config());
  const auto b = run_experiment_serial(small_config());
  for (std::size_t k = 0; k < a.trials.size(); ++k) {
    CHECK(a.trials[k].seed == b.trials[k].seed);
    for (std::size_t m = 0; m < 3; ++m) {
      for (std::size_t j = 0; j < 4; ++j) {
        CHECK(a.trials[k].traces[m].points[j].error == b.trials[k].traces[m].points[j].error);
      }
    }
  }
}

TEST_CASE("fit failures are recorded and the trace continues") {
  auto c = small_config();
  c.d = 5;
  c.checkpoints = {3, 200};
  c.trials = 2;
  const auto rep = run_experiment(c);
  for (const auto& t : rep.trials) {
    for (const auto& tr : t.traces) {
      REQUIRE(tr.points.size() == 2);
      CHECK(std::isnan(tr.points[0].error));
      CHECK_FALSE(tr.points[0].failure.empty());
      CHECK(std::isfinite(tr.points[1].error));
    }
  }
  CHECK(rep.failure_count() == 2 * 3);
}

TEST_CASE("trial randomness does not depend on the sweep cell") {
  auto c = small_config();
  const auto s1 = trial_system(c, 2);
  c.model.p = 0.8;
  const auto s2 = trial_system(c, 2);
  CHECK(s1.a_star == s2.a_star);
  CHECK(trial_seed(17, 2) == trial_seed(17, 2));
  CHECK(trial_seed(17, 2) != trial_seed(17, 3));
  CHECK(trial_seed(17, 2) != trial_seed(18, 2));
}

TEST_CASE("sweep layout and summaries") {
  auto c = small_config();
  c.estimators = {Method::L1Norm};
  c.trials = 3;
  const std::vector<double> ps{0.6, 0.7};
  const std::vector<std::size_t> ds{2, 3};
  const auto table = sweep(c, ps, ds);
  REQUIRE(table.cells.size() == 4);
  CHECK(table.cells[0].p == 0.6);
  CHECK(table.cells[0].d == 2);
  CHECK(table.cells[1].d == 3);
  CHECK(table.cells[2].p == 0.7);
  for (const auto& cell : table.cells) {
    CHECK(cell.report.config.model.p == cell.p);
    CHECK(cell.summary(Method::L1Norm).times.size() == 3);
    CHECK_THROWS_AS(cell.summary(Method::Ols), InvalidInput);
    // The same trial index runs on the same system in every cell.
    CHECK(cell.report.trials[1].seed == trial_seed(c.master_seed, 1));
  }
  CHECK_THROWS_AS(sweep(c, std::vector<double>{}, ds), InvalidInput);
}

TEST_CASE("fixed systems are used in every trial") {
  auto c = small_config();
  c.d = 1;
  c.model = remark1_model();
  c.fixed_system = SystemSpec{Matrix{{0.5}}, {0.5}};
  c.trials = 2;
  const auto rep = run_experiment(c);
  for (const auto& t : rep.trials) {
    CHECK_FALSE(t.traces[2].recovery_time.has_value());
    CHECK(t.certificate.has_value());
    CHECK_FALSE(t.certificate->certified);
  }
}
