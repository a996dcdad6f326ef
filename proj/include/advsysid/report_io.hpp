#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "advsysid/certificate.hpp"
#include "advsysid/estimators.hpp"
#include "advsysid/experiments.hpp"

namespace advsysid {

using json = nlohmann::json;

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

json to_json(const EstimatorResult& r, const std::optional<Matrix>& a_star = std::nullopt);
json to_json(const CertificateReport& r);
json to_json(const DisturbanceModel& m);
json to_json(const ExperimentConfig& c);
json to_json(const RecoverySummary& s);
/// Config echo, per-trial summaries and certificate results.
json to_json(const RecoveryReport& r);
json to_json(const SweepTable& t);

/// Columns: trial, estimator, T, frobenius_error (blank when the fit failed).
void write_trace_csv(std::ostream& os, const RecoveryReport& report);
/// Columns: p, d, estimator, trial, recovery_time_or_blank.
void write_sweep_csv(std::ostream& os, const SweepTable& table);

/// Writes `contents` to `path`, throwing std::runtime_error on failure.
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace advsysid
