#include "advsysid/lad.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "advsysid/errors.hpp"
#include "advsysid/rng.hpp"

namespace advsysid {

namespace {

// Infinitesimal perturbation coefficient of target t, uniform in (-1, 1).
double perturbation(std::size_t t) {
  const std::uint64_t h = mix64(0x243f6a8885a308d3ULL ^ static_cast<std::uint64_t>(t));
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53 * 2.0 - 1.0;
}

// Residual zero-threshold for observation t given the current coefficients.
double zero_threshold(std::span<const double> x, double y, std::span<const double> a, double tol) {
  double s = std::abs(y);
  for (std::size_t k = 0; k < x.size(); ++k) s += std::abs(x[k] * a[k]);
  return tol * std::max(s, 1e-300);
}

// Greedy starting basis: observations ordered by least-squares residual,
// accepted while they add a well-conditioned new direction.
std::vector<std::size_t> initial_basis(const Matrix& x, std::span<const double> y) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();

  Vector a(d, 0.0);
  {
    Matrix gram(d, d);
    Matrix rhs(d, 1);
    for (std::size_t t = 0; t < n; ++t) {
      const auto row = x.row(t);
      for (std::size_t i = 0; i < d; ++i) {
        rhs(i, 0) += row[i] * y[t];
        for (std::size_t j = 0; j < d; ++j) gram(i, j) += row[i] * row[j];
      }
    }
    try {
      const Matrix sol = solve_spd(gram, rhs);
      for (std::size_t i = 0; i < d; ++i) a[i] = sol(i, 0);
    } catch (const DegenerateGram&) {
      std::fill(a.begin(), a.end(), 0.0);
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Vector res(n);
  for (std::size_t t = 0; t < n; ++t) res[t] = std::abs(y[t] - dot(x.row(t), a));
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return res[l] < res[r]; });

  for (double threshold : {1e-2, 1e-6, 1e-10}) {
    std::vector<Vector> q;
    std::vector<std::size_t> basis;
    for (std::size_t t : order) {
      const auto row = x.row(t);
      const double nrm = norm2(row);
      if (nrm == 0.0) continue;
      Vector v(row.begin(), row.end());
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& qk : q) {
          const double c = dot(v, qk);
          for (std::size_t i = 0; i < d; ++i) v[i] -= c * qk[i];
        }
      }
      const double rn = norm2(v);
      if (rn <= threshold * nrm) continue;
      for (auto& e : v) e /= rn;
      q.push_back(std::move(v));
      basis.push_back(t);
      if (basis.size() == d) return basis;
    }
    if (threshold == 1e-10) {
      throw LpFailure("lad: regressors are rank deficient",
                      "rank " + std::to_string(basis.size()) + " < d = " + std::to_string(d));
    }
  }
  return {};
}

struct Breakpoint {
  double value;  // finite part of the step length
  double eps;    // coefficient of the infinitesimal
  double weight;
  std::size_t t;
};

}  // namespace

LadResult lad_row(const Matrix& x, std::span<const double> y, const LadOptions& options) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (y.size() != n) throw InvalidInput("lad_row: regressor and target counts differ");
  if (d == 0) throw InvalidInput("lad_row: empty regressors");
  if (n < d) throw InvalidInput("lad_row: need at least d observations");
  if (!x.all_finite()) throw InvalidInput("lad_row: non-finite regressors");
  for (double v : y)
    if (!std::isfinite(v)) throw InvalidInput("lad_row: non-finite targets");

  const double tol = options.tol;
  const std::size_t max_iterations = options.max_iterations ? options.max_iterations : 50 * (n + d);

  Vector pert(n);
  for (std::size_t t = 0; t < n; ++t) pert[t] = perturbation(t);

  std::vector<std::size_t> basis = initial_basis(x, y);
  std::vector<char> in_basis(n, 0);
  for (std::size_t t : basis) in_basis[t] = 1;

  LadResult result;
  Vector a0(d), a1(d), c(d), delta(d);
  Vector r0(n), r1(n), q(n);
  std::vector<signed char> sign(n);
  std::vector<Breakpoint> breakpoints;
  breakpoints.reserve(n);

  for (std::size_t iter = 0;; ++iter) {
    Matrix b(d, d);
    for (std::size_t k = 0; k < d; ++k)
      std::copy(x.row(basis[k]).begin(), x.row(basis[k]).end(), b.row(k).begin());
    const LuFactor lu(b);
    if (lu.singular()) throw LpFailure("lad: singular basis", "basis matrix lost rank at iteration " + std::to_string(iter));

    for (std::size_t k = 0; k < d; ++k) {
      a0[k] = y[basis[k]];
      a1[k] = pert[basis[k]];
    }
    lu.solve(a0);
    lu.solve(a1);

    std::fill(c.begin(), c.end(), 0.0);
    Vector g(d, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      if (in_basis[t]) {
        r0[t] = 0.0;
        r1[t] = 0.0;
        sign[t] = 0;
        continue;
      }
      const auto row = x.row(t);
      r0[t] = y[t] - dot(row, a0);
      r1[t] = pert[t] - dot(row, a1);
      if (std::abs(r0[t]) <= zero_threshold(row, y[t], a0, tol)) {
        r0[t] = 0.0;
        sign[t] = r1[t] < 0.0 ? -1 : 1;
      } else {
        sign[t] = r0[t] < 0.0 ? -1 : 1;
      }
      for (std::size_t k = 0; k < d; ++k) g[k] += sign[t] * row[k];
    }
    c = g;
    lu.solve_transpose(c);

    std::size_t leave = d;
    double best = 1.0 + tol;
    double max_dual = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      max_dual = std::max(max_dual, std::abs(c[k]));
      if (std::abs(c[k]) > best) {
        best = std::abs(c[k]);
        leave = k;
      }
    }
    result.iterations = iter;
    if (leave == d) {
      result.converged = true;
      result.max_dual = max_dual;
      result.non_unique = max_dual >= 1.0 - tol;
      break;
    }
    if (iter >= max_iterations) {
      result.converged = false;
      result.max_dual = max_dual;
      result.non_unique = true;
      break;
    }

    // Edge direction: keep the other basic residuals at zero, move residual
    // of the leaving observation by σ.
    const double sigma = c[leave] > 0.0 ? 1.0 : -1.0;
    std::fill(delta.begin(), delta.end(), 0.0);
    delta[leave] = sigma;
    lu.solve(delta);
    double delta_scale = 0.0;
    for (double v : delta) delta_scale = std::max(delta_scale, std::abs(v));

    breakpoints.clear();
    for (std::size_t t = 0; t < n; ++t) {
      if (in_basis[t]) continue;
      const auto row = x.row(t);
      q[t] = dot(row, delta);
      double row_scale = 0.0;
      for (double v : row) row_scale += std::abs(v);
      if (std::abs(q[t]) <= 1e-14 * row_scale * delta_scale) continue;
      // Residual r_t(s) = r_t − s·q_t crosses zero at s = r_t / q_t.
      if ((sign[t] > 0) != (q[t] > 0.0)) continue;
      breakpoints.push_back({r0[t] / q[t], r1[t] / q[t], std::abs(q[t]), t});
    }
    std::sort(breakpoints.begin(), breakpoints.end(), [](const Breakpoint& l, const Breakpoint& r) {
      if (l.value != r.value) return l.value < r.value;
      if (l.eps != r.eps) return l.eps < r.eps;
      return l.t < r.t;
    });
    double slope = 1.0 - best;
    std::size_t entering = n;
    for (const auto& bp : breakpoints) {
      slope += 2.0 * bp.weight;
      if (slope >= 0.0) {
        entering = bp.t;
        break;
      }
    }
    if (entering == n) {
      throw LpFailure("lad: descent direction without a bounding breakpoint",
                      "unbounded edge at iteration " + std::to_string(iter));
    }
    in_basis[basis[leave]] = 0;
    basis[leave] = entering;
    in_basis[entering] = 1;
  }

  result.coef = a0;
  result.basis = basis;
  double obj = 0.0;
  for (std::size_t t = 0; t < n; ++t) obj += std::abs(y[t] - dot(x.row(t), a0));
  result.objective = obj;
  return result;
}

}  // namespace advsysid
