#include "advsysid/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <vector>

#include "advsysid/errors.hpp"

namespace advsysid {

std::string to_string(Method m) {
  switch (m) {
    case Method::Ols: return "ols";
    case Method::L2Norm: return "l2norm";
    case Method::L1Norm: return "l1";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "ols" || name == "OLS") return Method::Ols;
  if (name == "l2norm" || name == "L2Norm" || name == "l2") return Method::L2Norm;
  if (name == "l1" || name == "L1Norm" || name == "l1norm") return Method::L1Norm;
  throw InvalidInput("unknown estimator '" + name + "'");
}

RegressionData regression_data(const Trajectory& traj) {
  const std::size_t n = traj.horizon();
  const std::size_t d = traj.dim();
  if (traj.states.size() != n + 1) throw InvalidInput("trajectory: inconsistent lengths");
  RegressionData data{Matrix(n, d), Matrix(n, d)};
  for (std::size_t t = 0; t < n; ++t) {
    std::copy(traj.states[t].begin(), traj.states[t].end(), data.regressors.row(t).begin());
    std::copy(traj.states[t + 1].begin(), traj.states[t + 1].end(), data.targets.row(t).begin());
  }
  return data;
}

namespace {

void check_fit_inputs(const Trajectory& traj, const char* who) {
  if (traj.dim() == 0) throw InvalidInput(std::string(who) + ": empty trajectory");
  if (traj.horizon() < traj.dim()) {
    throw InvalidInput(std::string(who) + ": need T >= d (T = " + std::to_string(traj.horizon()) +
                       ", d = " + std::to_string(traj.dim()) + ")");
  }
}

Vector residual(const Trajectory& traj, const Matrix& a, std::size_t t) {
  Vector r = a * traj.states[t];
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = traj.states[t + 1][i] - r[i];
  return r;
}

// Âᵀ = (Σ w_t x_t x_tᵀ)⁻¹ Σ w_t x_t x_{t+1}ᵀ
Matrix weighted_least_squares(const Trajectory& traj, std::span<const double> weights) {
  const std::size_t d = traj.dim();
  Matrix gram(d, d);
  Matrix cross(d, d);
  for (std::size_t t = 0; t < traj.horizon(); ++t) {
    const double w = weights.empty() ? 1.0 : weights[t];
    const Vector& x = traj.states[t];
    const Vector& y = traj.states[t + 1];
    for (std::size_t i = 0; i < d; ++i) {
      const double wx = w * x[i];
      for (std::size_t j = 0; j < d; ++j) {
        gram(i, j) += wx * x[j];
        cross(i, j) += wx * y[j];
      }
    }
  }
  try {
    return solve_spd(gram, cross).transpose();
  } catch (const DegenerateGram& e) {
    throw InsufficientExcitation(std::string("insufficient excitation: ") + e.what());
  }
}

}  // namespace

double ols_loss(const Trajectory& traj, const Matrix& a) {
  double s = 0.0;
  for (std::size_t t = 0; t < traj.horizon(); ++t) {
    const Vector r = residual(traj, a, t);
    s += dot(r, r);
  }
  return s;
}

double l2norm_loss(const Trajectory& traj, const Matrix& a) {
  double s = 0.0;
  for (std::size_t t = 0; t < traj.horizon(); ++t) s += norm2(residual(traj, a, t));
  return s;
}

double l1_loss(const Trajectory& traj, const Matrix& a) {
  double s = 0.0;
  for (std::size_t t = 0; t < traj.horizon(); ++t)
    for (double v : residual(traj, a, t)) s += std::abs(v);
  return s;
}

double loss(Method m, const Trajectory& traj, const Matrix& a) {
  switch (m) {
    case Method::Ols: return ols_loss(traj, a);
    case Method::L2Norm: return l2norm_loss(traj, a);
    case Method::L1Norm: return l1_loss(traj, a);
  }
  return 0.0;
}

EstimatorResult fit_ols(const Trajectory& traj) {
  check_fit_inputs(traj, "fit_ols");
  EstimatorResult r;
  r.method = Method::Ols;
  r.a_hat = weighted_least_squares(traj, {});
  r.objective = ols_loss(traj, r.a_hat);
  r.converged = true;
  r.iterations = 1;
  return r;
}

EstimatorResult fit_l2norm(const Trajectory& traj, double tol) {
  check_fit_inputs(traj, "fit_l2norm");
  constexpr std::size_t kMaxIterations = 500;
  constexpr std::size_t kMaxPerLevel = 100;
  constexpr double kWeightFloor = 1e-12;

  const std::size_t n = traj.horizon();
  EstimatorResult r;
  r.method = Method::L2Norm;
  r.tol = tol;

  Matrix a = weighted_least_squares(traj, {});
  Vector norms(n);
  auto refresh_norms = [&](const Matrix& m) {
    double total = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      norms[t] = norm2(residual(traj, m, t));
      total += norms[t];
    }
    return total;
  };

  double objective = refresh_norms(a);
  Matrix best = a;
  double best_obj = objective;
  const double scale = objective / static_cast<double>(n);
  if (scale == 0.0) {
    r.a_hat = a;
    r.objective = 0.0;
    r.converged = true;
    r.iterations = 1;
    return r;
  }

  // Smoothing ε relative to the mean residual norm of the starting fit,
  // decayed ×0.1 per level from 1e-2 to 1e-10.
  Vector weights(n);
  std::size_t iterations = 0;
  bool converged = false;
  for (double rel_eps = 1e-2; rel_eps >= 1e-10 * 0.999 && iterations < kMaxIterations; rel_eps *= 0.1) {
    const double eps = rel_eps * scale;
    const bool last_level = rel_eps < 1e-10 * 1.001;
    for (std::size_t k = 0; k < kMaxPerLevel && iterations < kMaxIterations; ++k) {
      for (std::size_t t = 0; t < n; ++t) {
        weights[t] = 1.0 / std::max(std::sqrt(norms[t] * norms[t] + eps * eps), kWeightFloor);
      }
      Matrix next;
      try {
        next = weighted_least_squares(traj, weights);
      } catch (const InsufficientExcitation&) {
        break;  // weights collapsed onto too few points; keep best iterate
      }
      ++iterations;
      const double next_obj = refresh_norms(next);
      const double change = std::abs(objective - next_obj);
      a = std::move(next);
      objective = next_obj;
      if (objective < best_obj) {
        best_obj = objective;
        best = a;
      }
      if (change < tol * (1.0 + objective)) {
        if (last_level) converged = true;
        break;
      }
    }
  }
  r.a_hat = best;
  r.objective = best_obj;
  r.iterations = iterations;
  r.converged = converged;
  return r;
}

namespace {

EstimatorResult fit_l1_impl(const Trajectory& traj, double tol, bool parallel) {
  check_fit_inputs(traj, "fit_l1");
  const std::size_t d = traj.dim();
  const RegressionData data = regression_data(traj);
  const Matrix targets_t = data.targets.transpose();  // row i: coordinate i of x_{t+1}

  std::vector<LadResult> rows(d);
  std::vector<std::exception_ptr> errors(d);
  LadOptions opts;
  opts.tol = tol;

  const auto solve_row = [&](std::size_t i) {
    try {
      rows[i] = lad_row(data.regressors, targets_t.row(i), opts);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(d); ++i) solve_row(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < d; ++i) solve_row(i);
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const LpFailure& e) {
      throw LpFailure("fit_l1 row " + std::to_string(i) + ": " + e.what(), e.certificate());
    } catch (const std::exception& e) {
      throw std::runtime_error("fit_l1 row " + std::to_string(i) + ": " + e.what());
    }
  }

  EstimatorResult r;
  r.method = Method::L1Norm;
  r.tol = tol;
  r.a_hat = Matrix(d, d);
  r.converged = true;
  for (std::size_t i = 0; i < d; ++i) {
    std::copy(rows[i].coef.begin(), rows[i].coef.end(), r.a_hat.row(i).begin());
    r.objective += rows[i].objective;
    r.iterations += rows[i].iterations;
    r.converged = r.converged && rows[i].converged;
    r.non_unique = r.non_unique || rows[i].non_unique;
  }
  return r;
}

}  // namespace

EstimatorResult fit_l1(const Trajectory& traj, double tol) { return fit_l1_impl(traj, tol, true); }

EstimatorResult fit_l1_serial(const Trajectory& traj, double tol) { return fit_l1_impl(traj, tol, false); }

EstimatorResult fit(Method m, const Trajectory& traj) {
  switch (m) {
    case Method::Ols: return fit_ols(traj);
    case Method::L2Norm: return fit_l2norm(traj);
    case Method::L1Norm: return fit_l1(traj);
  }
  throw InvalidInput("unknown method");
}

}  // namespace advsysid
