#include <doctest.h>

#include <cmath>
#include <regex>
#include <sstream>

#include "advsysid/config.hpp"
#include "advsysid/report_io.hpp"
#include "advsysid/svg_plot.hpp"

using namespace advsysid;

namespace {

std::string config_error(const std::string& yaml) {
  try {
    parse_config(yaml);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

// Minimal well-formedness check: balanced tags and a single root.
bool balanced_xml(const std::string& doc) {
  std::vector<std::string> stack;
  std::size_t roots = 0;
  const std::regex tag(R"(<(/?)([A-Za-z][\w:-]*)[^>]*?(/?)>)");
  for (auto it = std::sregex_iterator(doc.begin(), doc.end(), tag); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    if (m[1] == "/") {
      if (stack.empty() || stack.back() != m[2]) return false;
      stack.pop_back();
    } else if (m[3] != "/") {
      if (stack.empty()) ++roots;
      stack.push_back(m[2]);
    } else if (stack.empty()) {
      ++roots;
    }
  }
  return stack.empty() && roots == 1;
}

}  // namespace

TEST_CASE("presets resolve") {
  for (const auto& name : preset_names()) {
    const auto c = parse_config("preset: " + name + "\n");
    CHECK(c.preset == name);
    CHECK_NOTHROW(c.validate());
    CHECK_NOTHROW(make_experiment(c).validate());
  }
  const auto r1 = parse_config("preset: remark1\n");
  CHECK(r1.d == 1);
  CHECK(r1.a_star->operator()(0, 0) == 0.5);
  CHECK(r1.x0->at(0) == 0.5);
  CHECK(r1.horizon == 500);
  const auto e2 = parse_config("preset: example2\n");
  CHECK(e2.target_norm == 0.95);
  CHECK(e2.checkpoints.back() == 8000);
  CHECK(e2.model.kind == DisturbanceKind::ArbitraryNoncentral);
}

TEST_CASE("config overrides") {
  const auto c = parse_config(R"(
preset: example1
seed: 99
system: {d: 4, target_norm: 0.5}
disturbance: {p: 0.75, gamma_pos: [5, 8], shared_gamma: true}
simulate: {T: 300}
experiment:
  checkpoints: [100, 200, 300]
  trials: 3
  estimators: [l1, ols]
  p_values: [0.7, 0.8]
certify: {epsilon: 0.1, sampled: 20}
)");
  CHECK(c.seed == 99);
  CHECK(c.d == 4);
  CHECK(c.model.p == 0.75);
  CHECK(c.model.sign_restricted.pos_hi == 8.0);
  CHECK(c.model.beta_bound == 8.0);
  CHECK(c.model.sign_restricted.shared_gamma);
  CHECK(c.horizon == 300);
  CHECK(c.estimators == std::vector<Method>{Method::L1Norm, Method::Ols});
  CHECK(*c.epsilon == 0.1);
  CHECK(c.sampled == 20);
  const auto g = parse_config("disturbance: {kind: iid_gaussian, p: 1, mean: 0, variance: 4}\n");
  CHECK(g.model.kind == DisturbanceKind::IidGaussian);
  CHECK(g.model.gaussian.variance == 4.0);
}

TEST_CASE("config errors name the field") {
  CHECK(config_error("preset: example1\nexperiment: {trials: 0}\n") == "experiment.trials");
  CHECK(config_error("preset: example1\nexperiment: {estimators: []}\n") == "experiment.estimators");
  CHECK(config_error("preset: example1\nexperiment: {estimators: [lasso]}\n") == "experiment.estimators[0]");
  CHECK(config_error("preset: nope\n") == "preset");
  CHECK(config_error("presets: example1\n") == "presets");
  CHECK(config_error("disturbance: {kind: laplace}\n") == "disturbance.kind");
  CHECK(config_error("disturbance: {kind: iid_gaussian, variance: -1}\n") == "disturbance.variance");
  CHECK(config_error("disturbance: {kind: arbitrary_noncentral, mean: 3}\n") == "disturbance.mean");
  CHECK(config_error("preset: example1\ndisturbance: {p: 1.5}\n") == "disturbance");
  CHECK(config_error("system: {a_star: [[0.5, 0.1]]}\n") == "system.a_star[0]");
  CHECK(config_error("system: {a_star: [[1.5]]}\n") == "system.a_star");
  CHECK(config_error("preset: remark1\nsystem: {d: 2}\n") == "system.d");
  CHECK(config_error("system: {d: ten}\n") == "system.d");
  CHECK(config_error("experiment: {checkpoints: [100, 50]}\n") == "experiment.checkpoints");
  CHECK(config_error("certify: {epsilon: -1}\n") == "certify.epsilon");
  CHECK(config_error("system: [1, 2\n") == "config");
  CHECK_THROWS_AS(load_config("/nonexistent/config.yaml"), ConfigError);
}

TEST_CASE("config JSON round trip, including manifests") {
  for (const auto& name : preset_names()) {
    auto c = parse_config("preset: " + name + "\nseed: 5\n");
    const auto j = to_json(c);
    const auto back = parse_config(j.dump());
    CHECK(to_json(back) == j);
    const nlohmann::json manifest{{"subcommand", "experiment"}, {"config", j}};
    CHECK(to_json(parse_config(manifest.dump())) == j);
  }
}

TEST_CASE("make_system honours explicit matrices and seeds") {
  const auto c = parse_config("preset: example1\nsystem: {d: 3}\nseed: 4\n");
  const auto a = make_system(c);
  const auto b = make_system(c);
  CHECK(a.a_star == b.a_star);
  CHECK(spectral_norm(a.a_star) == doctest::Approx(0.6));
  const auto r = make_system(parse_config("preset: remark1\n"));
  CHECK(r.a_star == Matrix{{0.5}});
}

TEST_CASE("estimator and certificate JSON") {
  EstimatorResult r;
  r.a_hat = Matrix{{1.0, 2.0}, {3.0, 4.0}};
  r.method = Method::L1Norm;
  r.objective = 1.5;
  const auto j = to_json(r, Matrix{{1.0, 2.0}, {3.0, 3.0}});
  CHECK(j["method"] == "l1");
  CHECK(j["frobenius_error"].get<double>() == doctest::Approx(1.0));
  CHECK(matrix_from_json(j["a_hat"]) == r.a_hat);

  CertificateReport c;
  c.per_coordinate_min = {1.0, -2.0};
  c.margin = -2.0;
  const auto jc = to_json(c);
  for (const char* key : {"certified", "per_coordinate_min", "lipschitz_bound", "epsilon", "net_size", "margin"}) {
    CHECK(jc.contains(key));
  }
}

TEST_CASE("trace and sweep CSV layout") {
  ExperimentConfig c;
  c.d = 2;
  c.model = example1_model(0.7);
  c.checkpoints = {2, 100};
  c.trials = 2;
  c.estimators = {Method::Ols, Method::L1Norm};
  const std::vector<double> ps{0.7};
  const std::vector<std::size_t> ds{2, 3};
  const auto table = sweep(c, ps, ds);

  std::ostringstream trace;
  write_trace_csv(trace, table.cells[0].report);
  std::istringstream lines(trace.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "trial,estimator,T,frobenius_error");
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 2 * 2 * 2);

  // T = 2 with d = 3 is too short for a fit: the error cell is blank.
  std::ostringstream trace3;
  write_trace_csv(trace3, table.cells[1].report);
  CHECK(trace3.str().find("0,ols,2,\n") != std::string::npos);

  std::ostringstream sw;
  write_sweep_csv(sw, table);
  std::istringstream sl(sw.str());
  std::getline(sl, line);
  CHECK(line == "p,d,estimator,trial,recovery_time_or_blank");
  rows = 0;
  while (std::getline(sl, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
  }
  CHECK(rows == 2 * 2 * 2);
  const auto j = to_json(table);
  CHECK(j["cells"].size() == 2);
  CHECK(j["cells"][0]["summary"].contains("l1"));
}

TEST_CASE("SVG error plot") {
  ExperimentConfig c;
  c.d = 2;
  c.model = example1_model(0.7);
  c.checkpoints = {50, 100, 200};
  c.trials = 3;
  const auto rep = run_experiment(c);
  const std::string svg = render_log_plot(error_plot(rep, "errors <p = 0.7 & d = 2>"));
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(balanced_xml(svg));
  std::size_t polylines = 0;
  for (std::size_t pos = 0; (pos = svg.find("<polyline", pos)) != std::string::npos; ++pos) ++polylines;
  CHECK(polylines == 3);
  for (const char* label : {">ols<", ">l2norm<", ">l1<", "(log scale)", ">T<"}) {
    CHECK(svg.find(label) != std::string::npos);
  }
  CHECK(svg.find("&lt;p = 0.7 &amp; d = 2&gt;") != std::string::npos);

  PlotSpec empty;
  empty.series.push_back({"none", {}});
  CHECK(balanced_xml(render_log_plot(empty)));
}

TEST_CASE("shipped configs load") {
  for (const char* name : {"example1", "example2", "remark1", "gaussian", "quick"}) {
    CAPTURE(name);
    CHECK_NOTHROW(load_config(std::string(ADVSYSID_CONFIG_DIR) + "/" + name + ".yaml"));
  }
}
