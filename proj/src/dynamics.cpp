#include "advsysid/dynamics.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "advsysid/errors.hpp"

namespace advsysid {

namespace {
constexpr double kDivergenceLimit = 1e150;
}

void SystemSpec::validate() const {
  const std::size_t d = x0.size();
  if (d == 0) throw InvalidInput("system: dimension must be positive");
  if (a_star.rows() != d || a_star.cols() != d) throw InvalidInput("system: A* must be d x d with d = dim(x0)");
  if (!a_star.all_finite()) throw InvalidInput("system: A* has non-finite entries");
  for (double v : x0)
    if (!std::isfinite(v)) throw InvalidInput("system: x0 has non-finite entries");
  if (!(spectral_norm(a_star) < 1.0)) throw InvalidInput("system: operator norm of A* must be < 1");
}

Trajectory Trajectory::prefix(std::size_t steps) const {
  if (steps > horizon()) throw InvalidInput("prefix longer than trajectory");
  Trajectory p;
  p.states.assign(states.begin(), states.begin() + static_cast<std::ptrdiff_t>(steps + 1));
  p.disturbances.assign(disturbances.begin(), disturbances.begin() + static_cast<std::ptrdiff_t>(steps));
  p.attack_flags.assign(attack_flags.begin(), attack_flags.begin() + static_cast<std::ptrdiff_t>(steps));
  return p;
}

SystemSpec random_system(std::size_t d, double target_norm, Rng& rng) {
  if (d == 0) throw InvalidInput("random_system: d must be positive");
  if (!(target_norm > 0.0 && target_norm < 1.0)) {
    throw InvalidInput("random_system: target_norm must lie in (0, 1)");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  SystemSpec spec;
  spec.a_star = Matrix(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) spec.a_star(i, j) = normal(rng);
  const double sigma = spectral_norm(spec.a_star);
  spec.a_star *= target_norm / sigma;
  spec.x0.resize(d);
  for (auto& v : spec.x0) v = normal(rng);
  return spec;
}

SystemSpec random_system(std::size_t d, double target_norm, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0, kStreamSystem));
  return random_system(d, target_norm, rng);
}

Trajectory simulate(const SystemSpec& spec, const DisturbanceModel& model, std::size_t steps,
                    std::uint64_t seed) {
  if (steps < 1) throw InvalidInput("simulate: T must be at least 1");
  spec.validate();
  model.validate();
  const std::size_t d = spec.dim();
  if (model.required_dim != 0 && model.required_dim != d) {
    throw InvalidInput("simulate: disturbance " + model.label + " requires d = " + std::to_string(model.required_dim));
  }

  Rng flag_rng(derive_seed(seed, 0, kStreamAttackFlags));
  Rng value_rng(derive_seed(seed, 0, kStreamAttackValues));

  Trajectory traj;
  traj.states.reserve(steps + 1);
  traj.disturbances.reserve(steps);
  traj.attack_flags.reserve(steps);
  traj.states.push_back(spec.x0);
  for (std::size_t t = 0; t < steps; ++t) {
    const Vector& x = traj.states.back();
    const bool attack = draw_attack(model, flag_rng);
    Vector w = attack ? draw_attack_value(model, x, value_rng) : Vector(d, 0.0);
    Vector next = spec.a_star * x;
    for (std::size_t i = 0; i < d; ++i) next[i] += w[i];
    const double n = norm2(next);
    if (!(n <= kDivergenceLimit)) {
      throw Divergence("simulate: divergence at step " + std::to_string(t + 1) +
                           " (state norm exceeds 1e150)",
                       t + 1);
    }
    traj.disturbances.push_back(std::move(w));
    traj.attack_flags.push_back(attack);
    traj.states.push_back(std::move(next));
  }
  return traj;
}

AttackStats attack_stats(const Trajectory& traj) {
  AttackStats s;
  const auto& f = traj.attack_flags;
  for (std::size_t t = 0; t < f.size(); ++t) {
    if (f[t]) ++s.k_t_size;
    if (t >= 1 && !f[t] && f[t - 1]) ++s.n_t;
  }
  return s;
}

void audit_recurrence(const SystemSpec& spec, const Trajectory& traj) {
  if (traj.states.size() != traj.disturbances.size() + 1 ||
      traj.attack_flags.size() != traj.disturbances.size()) {
    throw InvalidInput("trajectory: inconsistent lengths");
  }
  for (std::size_t t = 0; t < traj.horizon(); ++t) {
    const Vector ax = spec.a_star * traj.states[t];
    for (std::size_t i = 0; i < ax.size(); ++i) {
      if (ax[i] + traj.disturbances[t][i] != traj.states[t + 1][i]) {
        throw InvalidInput("trajectory: recurrence broken at step " + std::to_string(t));
      }
      if (!traj.attack_flags[t] && traj.disturbances[t][i] != 0.0) {
        throw InvalidInput("trajectory: nonzero disturbance on quiet step " + std::to_string(t));
      }
    }
  }
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const std::size_t d = traj.dim();
  os << "t";
  for (std::size_t i = 1; i <= d; ++i) os << ",x_" << i;
  for (std::size_t i = 1; i <= d; ++i) os << ",w_" << i;
  os << ",attack_flag\n";
  os << std::setprecision(17);
  for (std::size_t t = 0; t < traj.states.size(); ++t) {
    os << t;
    for (double v : traj.states[t]) os << ',' << v;
    if (t < traj.horizon()) {
      for (double v : traj.disturbances[t]) os << ',' << v;
      os << ',' << (traj.attack_flags[t] ? 1 : 0);
    } else {
      for (std::size_t i = 0; i <= d; ++i) os << ',';
    }
    os << '\n';
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& s, std::size_t line_no, const std::string& column) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw InvalidInput("trajectory CSV: bad value '" + s + "' in column '" + column + "' at line " +
                       std::to_string(line_no));
  }
  return v;
}

}  // namespace

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("trajectory CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header.size() < 4 || (header.size() - 2) % 2 != 0) {
    throw InvalidInput("trajectory CSV: header must be t, x_1..x_d, w_1..w_d, attack_flag");
  }
  const std::size_t d = (header.size() - 2) / 2;
  std::vector<std::string> expected{"t"};
  for (std::size_t i = 1; i <= d; ++i) expected.push_back("x_" + std::to_string(i));
  for (std::size_t i = 1; i <= d; ++i) expected.push_back("w_" + std::to_string(i));
  expected.emplace_back("attack_flag");
  for (std::size_t c = 0; c < expected.size(); ++c) {
    if (header[c] != expected[c]) {
      throw InvalidInput("trajectory CSV: expected column '" + expected[c] + "' at position " +
                         std::to_string(c + 1) + ", found '" + header[c] + "'");
    }
  }

  Trajectory traj;
  std::size_t line_no = 1;
  bool terminal_seen = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (terminal_seen) throw InvalidInput("trajectory CSV: rows after the terminal state");
    const auto cells = split_csv_line(line);
    if (cells.size() != expected.size()) {
      throw InvalidInput("trajectory CSV: line " + std::to_string(line_no) + " has " +
                         std::to_string(cells.size()) + " cells, expected " + std::to_string(expected.size()));
    }
    const double t = parse_double(cells[0], line_no, "t");
    if (t != static_cast<double>(traj.states.size())) {
      throw InvalidInput("trajectory CSV: non-consecutive t at line " + std::to_string(line_no));
    }
    Vector x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = parse_double(cells[1 + i], line_no, expected[1 + i]);
    traj.states.push_back(std::move(x));
    if (cells.back().empty()) {
      terminal_seen = true;
      continue;
    }
    Vector w(d);
    for (std::size_t i = 0; i < d; ++i) w[i] = parse_double(cells[1 + d + i], line_no, expected[1 + d + i]);
    const double flag = parse_double(cells.back(), line_no, "attack_flag");
    if (flag != 0.0 && flag != 1.0) {
      throw InvalidInput("trajectory CSV: attack_flag must be 0 or 1 at line " + std::to_string(line_no));
    }
    traj.disturbances.push_back(std::move(w));
    traj.attack_flags.push_back(flag == 1.0);
  }
  if (!terminal_seen || traj.disturbances.empty()) {
    throw InvalidInput("trajectory CSV: missing terminal state row");
  }
  return traj;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_trajectory_csv(os, traj);
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open trajectory CSV '" + path + "'");
  return read_trajectory_csv(is);
}

}  // namespace advsysid
