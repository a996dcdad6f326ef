#include "advsysid/report_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "advsysid/errors.hpp"

namespace advsysid {

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json optional_number(const std::optional<double>& v) { return v ? finite_or_null(*v) : json(nullptr); }

}  // namespace

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InvalidInput("matrix must be a nonempty list of rows");
  std::vector<Vector> rows;
  for (const auto& row : j) {
    if (!row.is_array()) throw InvalidInput("matrix rows must be lists of numbers");
    rows.push_back(row.get<Vector>());
  }
  return Matrix::from_rows(rows);
}

json to_json(const EstimatorResult& r, const std::optional<Matrix>& a_star) {
  json j{{"method", to_string(r.method)},
         {"a_hat", matrix_to_json(r.a_hat)},
         {"objective", finite_or_null(r.objective)},
         {"iterations", r.iterations},
         {"converged", r.converged},
         {"tol", r.tol},
         {"non_unique", r.non_unique}};
  if (a_star) j["frobenius_error"] = finite_or_null(frobenius_distance(r.a_hat, *a_star));
  return j;
}

json to_json(const CertificateReport& r) {
  json mins = json::array();
  for (double v : r.per_coordinate_min) mins.push_back(finite_or_null(v));
  return {{"mode", to_string(r.mode)},
          {"certified", r.certified},
          {"per_coordinate_min", mins},
          {"lipschitz_bound", r.lipschitz_bound},
          {"epsilon", r.epsilon},
          {"covering_radius", r.covering_radius},
          {"net_size", r.net_size},
          {"margin", finite_or_null(r.margin)}};
}

json to_json(const DisturbanceModel& m) {
  json j{{"kind", to_string(m.kind)},
         {"p", m.p},
         {"declared_sigma_w", m.declared_sigma_w},
         {"declared_lambda", m.declared_lambda},
         {"label", m.label}};
  switch (m.kind) {
    case DisturbanceKind::IidGaussian:
      j["mean"] = m.gaussian.mean;
      j["variance"] = m.gaussian.variance;
      break;
    case DisturbanceKind::SignRestricted:
      j["gamma_neg"] = {m.sign_restricted.neg_lo, m.sign_restricted.neg_hi};
      j["gamma_pos"] = {m.sign_restricted.pos_lo, m.sign_restricted.pos_hi};
      j["shared_gamma"] = m.sign_restricted.shared_gamma;
      j["beta_bound"] = m.beta_bound;
      break;
    case DisturbanceKind::ArbitraryNoncentral:
      j["scale"] = m.noncentral.scale;
      j["offset"] = m.noncentral.offset;
      j["variance"] = m.noncentral.variance;
      break;
    default:
      break;
  }
  return j;
}

json to_json(const ExperimentConfig& c) {
  json est = json::array();
  for (Method m : c.estimators) est.push_back(to_string(m));
  json j{{"d", c.d},
         {"target_norm", c.target_norm},
         {"disturbance", to_json(c.model)},
         {"checkpoints", c.checkpoints},
         {"trials", c.trials},
         {"recovery_tol", c.recovery_tol},
         {"confidence_delta", c.confidence_delta},
         {"master_seed", c.master_seed},
         {"estimators", est}};
  if (c.fixed_system) {
    j["a_star"] = matrix_to_json(c.fixed_system->a_star);
    j["x0"] = c.fixed_system->x0;
  }
  return j;
}

json to_json(const RecoverySummary& s) {
  json times = json::array();
  for (const auto& t : s.times) times.push_back(t ? json(*t) : json(nullptr));
  return {{"recovery_times", times},
          {"median", optional_number(s.median)},
          {"q1", optional_number(s.q1)},
          {"q3", optional_number(s.q3)},
          {"recovered_fraction", s.recovered_fraction},
          {"never_recovered", s.never_recovered}};
}

json to_json(const RecoveryReport& r) {
  json trials = json::array();
  for (const auto& t : r.trials) {
    json traces = json::object();
    for (const auto& tr : t.traces) {
      json pts = json::array();
      for (const auto& pt : tr.points) {
        json p{{"T", pt.horizon},
               {"error", finite_or_null(pt.error)},
               {"converged", pt.converged},
               {"non_unique", pt.non_unique}};
        if (!pt.failure.empty()) p["failure"] = pt.failure;
        pts.push_back(std::move(p));
      }
      traces[to_string(tr.method)] = {
          {"recovery_time", tr.recovery_time ? json(*tr.recovery_time) : json(nullptr)},
          {"checkpoints", std::move(pts)}};
    }
    json jt{{"trial", t.trial},
            {"seed", t.seed},
            {"attacks", {{"k_t_size", t.attacks.k_t_size}, {"n_t", t.attacks.n_t}}},
            {"estimators", std::move(traces)},
            {"certificate", t.certificate ? to_json(*t.certificate) : json(nullptr)}};
    if (!t.failure.empty()) jt["failure"] = t.failure;
    trials.push_back(std::move(jt));
  }
  json rates = json::object();
  for (Method m : r.config.estimators) rates[to_string(m)] = r.recovery_rate(m);
  return {{"config", to_json(r.config)},
          {"recovery_rate", rates},
          {"failure_count", r.failure_count()},
          {"trials", std::move(trials)}};
}

json to_json(const SweepTable& t) {
  json cells = json::array();
  for (const auto& cell : t.cells) {
    json summaries = json::object();
    for (const auto& [m, s] : cell.summaries) summaries[to_string(m)] = to_json(s);
    cells.push_back({{"p", cell.p}, {"d", cell.d}, {"summary", summaries}, {"report", to_json(cell.report)}});
  }
  return {{"cells", cells}};
}

void write_trace_csv(std::ostream& os, const RecoveryReport& report) {
  os << "trial,estimator,T,frobenius_error\n" << std::setprecision(17);
  for (const auto& t : report.trials) {
    for (const auto& tr : t.traces) {
      for (const auto& pt : tr.points) {
        os << t.trial << ',' << to_string(tr.method) << ',' << pt.horizon << ',';
        if (std::isfinite(pt.error)) os << pt.error;
        os << '\n';
      }
    }
  }
}

void write_sweep_csv(std::ostream& os, const SweepTable& table) {
  os << "p,d,estimator,trial,recovery_time_or_blank\n" << std::setprecision(17);
  for (const auto& cell : table.cells) {
    for (const auto& t : cell.report.trials) {
      for (const auto& tr : t.traces) {
        os << cell.p << ',' << cell.d << ',' << to_string(tr.method) << ',' << t.trial << ',';
        if (tr.recovery_time) os << *tr.recovery_time;
        os << '\n';
      }
    }
  }
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << contents;
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace advsysid
