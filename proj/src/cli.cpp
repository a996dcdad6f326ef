#include "advsysid/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>

#include "advsysid/certificate.hpp"
#include "advsysid/config.hpp"
#include "advsysid/report_io.hpp"
#include "advsysid/svg_plot.hpp"

namespace advsysid {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

// Failures in reading inputs; reported with exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::size_t> sampled;
  std::string trajectory;
};

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string cell_tag(double p, std::size_t d) {
  std::ostringstream os;
  os << "p" << std::fixed << std::setprecision(3) << p << "_d" << d;
  return os.str();
}

RunConfig load(const Options& o) {
  if (!fs::exists(o.config_path)) throw UsageError("config file not found: " + o.config_path);
  RunConfig c;
  try {
    c = load_config(o.config_path);
  } catch (const InvalidInput& e) {
    throw UsageError(std::string("invalid config ") + o.config_path + ": " + e.what());
  }
  if (o.seed) c.seed = *o.seed;
  if (o.sampled) c.sampled = *o.sampled;
  return c;
}

Trajectory load_trajectory(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("trajectory file not found: " + path);
  try {
    return read_trajectory_csv(path);
  } catch (const InvalidInput& e) {
    throw UsageError("invalid trajectory " + path + ": " + e.what());
  }
}

// A* recorded by `simulate` next to the trajectory, else an explicit one in the config.
std::optional<Matrix> reference_system(const std::string& trajectory_path, const RunConfig& c) {
  const fs::path manifest = fs::path(trajectory_path).parent_path() / "manifest.json";
  if (fs::exists(manifest)) {
    std::ifstream in(manifest);
    try {
      const json j = json::parse(in);
      if (j.contains("system") && j["system"].contains("a_star")) return matrix_from_json(j["system"]["a_star"]);
    } catch (const std::exception&) {
      // unreadable manifest: fall back to the config
    }
  }
  if (c.a_star) return c.a_star;
  return std::nullopt;
}

void prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir);
}

json manifest(const std::string& command, const RunConfig& c, const Options& o) {
  return {{"subcommand", command},
          {"version", kVersion},
          {"timestamp", utc_timestamp()},
          {"seed", c.seed},
          {"threads", omp_get_max_threads()},
          {"config_path", o.config_path},
          {"out_dir", o.out_dir},
          {"config", to_json(c)}};
}

void write_json(const fs::path& path, const json& j) { write_text_file(path.string(), j.dump(2) + "\n"); }

int cmd_simulate(const Options& o, std::ostream& out) {
  const RunConfig c = load(o);
  const SystemSpec spec = make_system(c);
  prepare_out(o.out_dir);
  const Trajectory traj = simulate(spec, c.model, c.horizon, c.seed);
  write_trajectory_csv((fs::path(o.out_dir) / "trajectory.csv").string(), traj);
  json m = manifest("simulate", c, o);
  const AttackStats stats = attack_stats(traj);
  m["system"] = {{"a_star", matrix_to_json(spec.a_star)}, {"x0", spec.x0}};
  m["attacks"] = {{"k_t_size", stats.k_t_size}, {"n_t", stats.n_t}};
  write_json(fs::path(o.out_dir) / "manifest.json", m);
  out << "simulated T=" << traj.horizon() << " d=" << traj.dim() << " attacks=" << stats.k_t_size << " -> "
      << o.out_dir << "\n";
  return kExitOk;
}

int cmd_fit(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig c = load(o);
  if (o.trajectory.empty()) throw UsageError("fit requires --trajectory <csv>");
  const Trajectory traj = load_trajectory(o.trajectory);
  const auto a_star = reference_system(o.trajectory, c);
  prepare_out(o.out_dir);
  json results = json::array();
  int status = kExitOk;
  for (Method m : c.estimators) {
    try {
      const EstimatorResult r = fit(m, traj);
      results.push_back(to_json(r, a_star));
      out << to_string(m) << ": objective=" << r.objective;
      if (a_star) out << " error=" << frobenius_distance(r.a_hat, *a_star);
      out << (r.converged ? "" : " (not converged)") << "\n";
    } catch (const std::exception& e) {
      results.push_back({{"method", to_string(m)}, {"failure", e.what()}});
      err << "advsysid: " << to_string(m) << " failed: " << e.what() << "\n";
      status = kExitRuntime;
    }
  }
  json m = manifest("fit", c, o);
  m["trajectory"] = o.trajectory;
  write_json(fs::path(o.out_dir) / "manifest.json", m);
  write_json(fs::path(o.out_dir) / "fit.json",
             {{"trajectory", o.trajectory}, {"T", traj.horizon()}, {"d", traj.dim()}, {"estimators", results}});
  return status;
}

int cmd_certify(const Options& o, std::ostream& out) {
  const RunConfig c = load(o);
  Trajectory traj;
  if (!o.trajectory.empty()) {
    traj = load_trajectory(o.trajectory);
  } else {
    traj = simulate(make_system(c), c.model, c.horizon, c.seed);
  }
  CertifyOptions opts;
  if (c.sampled > 0) {
    opts.mode = CertifyMode::Sampled;
    opts.samples = c.sampled;
    opts.seed = c.seed;
  } else if (traj.dim() > 3) {
    std::ostringstream os;
    os << "exact certification needs an epsilon-net of up to (1 + 2/eps)^d points; at d = " << traj.dim()
       << " that exceeds the budget of " << kNetBudget << " (exact mode supports d <= 3). "
       << "Pass --sampled N for sampled evidence (never certifies).";
    throw UsageError(os.str());
  }
  opts.epsilon = c.epsilon;
  prepare_out(o.out_dir);
  const CertificateReport rep = certify(traj, opts);
  json m = manifest("certify", c, o);
  if (!o.trajectory.empty()) m["trajectory"] = o.trajectory;
  write_json(fs::path(o.out_dir) / "manifest.json", m);
  write_json(fs::path(o.out_dir) / "certificate.json", to_json(rep));
  out << "certified=" << (rep.certified ? "true" : "false") << " mode=" << to_string(rep.mode)
      << " margin=" << rep.margin << " net_size=" << rep.net_size << "\n";
  return kExitOk;
}

int cmd_experiment(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig c = load(o);
  const ExperimentConfig base = make_experiment(c);
  const std::vector<double> ps = c.p_values.empty() ? std::vector<double>{c.model.p} : c.p_values;
  const std::vector<std::size_t> ds = c.d_values.empty() ? std::vector<std::size_t>{c.d} : c.d_values;
  try {
    base.validate();
  } catch (const InvalidInput& e) {
    throw UsageError(std::string("invalid experiment: ") + e.what());
  }
  prepare_out(o.out_dir);
  const SweepTable table = sweep(base, ps, ds);
  const fs::path dir(o.out_dir);

  std::size_t failures = 0;
  std::size_t fits = 0;
  for (const auto& cell : table.cells) {
    const std::string tag = cell_tag(cell.p, cell.d);
    std::ostringstream csv;
    write_trace_csv(csv, cell.report);
    write_text_file((dir / ("trace_" + tag + ".csv")).string(), csv.str());
    std::ostringstream title;
    title << "median error vs T (p = " << cell.p << ", d = " << cell.d << ", " << cell.report.trials.size()
          << " trials)";
    write_text_file((dir / ("error_" + tag + ".svg")).string(), render_log_plot(error_plot(cell.report, title.str())));
    failures += cell.report.failure_count();
    fits += cell.report.trials.size() * base.estimators.size() * base.checkpoints.size();
    for (const auto& [m, s] : cell.summaries) {
      out << "p=" << cell.p << " d=" << cell.d << " " << to_string(m) << ": recovered " << s.recovered_fraction * 100.0
          << "% median_T=";
      if (s.median) out << *s.median;
      else out << "never";
      out << "\n";
    }
  }
  std::ostringstream csv;
  write_sweep_csv(csv, table);
  write_text_file((dir / "sweep.csv").string(), csv.str());
  json report = to_json(table);
  report["failure_count"] = failures;
  write_json(dir / "report.json", report);
  write_json(dir / "manifest.json", manifest("experiment", c, o));
  if (failures > 0) err << "advsysid: warning: " << failures << " of " << fits << " fits failed (see report.json)\n";
  return failures == fits ? kExitRuntime : kExitOk;
}

std::optional<int> env_threads() {
  const char* v = std::getenv("ADVSYSID_THREADS");
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) throw UsageError(std::string("ADVSYSID_THREADS must be a positive integer, got '") + v + "'");
  return static_cast<int>(n);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learning linear dynamics under adversarial disturbances", "advsysid"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "YAML config file (or a run manifest)")->required();
    sub->add_option("--out", o.out_dir, "Output directory")->required();
    sub->add_option("--seed", o.seed, "Master seed (overrides the config)");
    sub->add_option("--threads", o.threads, "OpenMP threads (default: ADVSYSID_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
  };
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate one trajectory");
  common(simulate_cmd);
  auto* fit_cmd = app.add_subcommand("fit", "Fit estimators to a trajectory CSV");
  common(fit_cmd);
  fit_cmd->add_option("--trajectory", o.trajectory, "Trajectory CSV written by simulate")->required();
  auto* experiment_cmd = app.add_subcommand("experiment", "Run recovery trials over the (p, d) grid");
  common(experiment_cmd);
  auto* certify_cmd = app.add_subcommand("certify", "Check the uniqueness certificate");
  common(certify_cmd);
  certify_cmd->add_option("--trajectory", o.trajectory, "Trajectory CSV (default: simulate from the config)");
  certify_cmd->add_option("--sampled", o.sampled, "Sampled mode with N random directions")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream cli_out;
    std::ostringstream cli_err;
    const int code = app.exit(e, cli_out, cli_err);
    out << cli_out.str();
    err << cli_err.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (o.threads) omp_set_num_threads(*o.threads);
    else if (auto n = env_threads()) omp_set_num_threads(*n);

    if (simulate_cmd->parsed()) return cmd_simulate(o, out);
    if (fit_cmd->parsed()) return cmd_fit(o, out, err);
    if (experiment_cmd->parsed()) return cmd_experiment(o, out, err);
    return cmd_certify(o, out);
  } catch (const UsageError& e) {
    err << "advsysid: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "advsysid: error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace advsysid
