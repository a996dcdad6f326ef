#include "advsysid/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "advsysid/errors.hpp"
#include "advsysid/rng.hpp"

namespace advsysid {

std::string to_string(CertifyMode mode) { return mode == CertifyMode::Exact ? "exact" : "sampled"; }

double net_size_bound(std::size_t d, double epsilon) {
  return std::pow(1.0 + 2.0 / epsilon, static_cast<double>(d));
}

double min_feasible_epsilon(std::size_t d) {
  return 2.0 / (std::pow(kNetBudget, 1.0 / static_cast<double>(d)) - 1.0);
}

namespace {

// Largest distance from `samples` random sphere points to their nearest
// Fibonacci-lattice point, or +inf once it exceeds `limit`.
double sampled_covering_radius(const std::vector<Vector>& pts, double limit, std::size_t samples,
                               std::uint64_t seed) {
  const auto n = static_cast<double>(pts.size());
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    Vector q{normal(rng), normal(rng), normal(rng)};
    const double nq = norm2(q);
    for (auto& v : q) v /= nq;
    // z_k = 1 − (2k+1)/N is decreasing in k; |Δz| ≤ distance, so only a band
    // of indices can hold a point within `limit`.
    const double lo_k = (1.0 - (q[2] + limit)) * n / 2.0 - 1.0;
    const double hi_k = (1.0 - (q[2] - limit)) * n / 2.0 + 1.0;
    const auto k0 = static_cast<std::size_t>(std::clamp(std::floor(lo_k), 0.0, n - 1.0));
    const auto k1 = static_cast<std::size_t>(std::clamp(std::ceil(hi_k), 0.0, n - 1.0));
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = k0; k <= k1; ++k) {
      const double dx = pts[k][0] - q[0];
      const double dy = pts[k][1] - q[1];
      const double dz = pts[k][2] - q[2];
      best = std::min(best, dx * dx + dy * dy + dz * dz);
    }
    worst = std::max(worst, std::sqrt(best));
    if (worst > limit) return std::numeric_limits<double>::infinity();
  }
  return worst;
}

std::vector<Vector> fibonacci_sphere(std::size_t n) {
  std::vector<Vector> pts(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t k = 0; k < n; ++k) {
    const double z = 1.0 - (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(n);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(k);
    pts[k] = {r * std::cos(phi), r * std::sin(phi), z};
  }
  return pts;
}

}  // namespace

NetSpec build_net(std::size_t d, double epsilon) {
  if (d == 0) throw InvalidInput("build_net: d must be at least 1");
  if (!(epsilon > 0.0)) throw InvalidInput("build_net: epsilon must be positive");
  const double bound = net_size_bound(d, epsilon);
  if (bound > kNetBudget) {
    std::ostringstream os;
    os << "net too large: (1 + 2/eps)^d = " << bound << " exceeds budget " << kNetBudget
       << "; use sampled mode or a larger epsilon";
    throw NetTooLarge(os.str(), bound);
  }
  if (d > 3) {
    std::ostringstream os;
    os << "net too large: exact nets are built only for d <= 3 (d = " << d << ", bound " << bound
       << "); use sampled mode";
    throw NetTooLarge(os.str(), bound);
  }

  NetSpec net;
  net.d = d;
  net.epsilon = epsilon;
  if (d == 1) {
    net.points = {{1.0}, {-1.0}};
    net.covering_radius = 0.0;
    return net;
  }
  if (d == 2) {
    // Neighbour angle ≤ 2·asin(ε/2), i.e. neighbour chord ≤ ε.
    const double max_angle = 2.0 * std::asin(std::min(1.0, epsilon / 2.0));
    const auto n = static_cast<std::size_t>(std::max(3.0, std::ceil(2.0 * std::numbers::pi / max_angle)));
    net.points.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      net.points.push_back({std::cos(th), std::sin(th)});
    }
    net.covering_radius = 2.0 * std::sin(std::numbers::pi / (2.0 * static_cast<double>(n)));
    return net;
  }

  auto n = static_cast<std::size_t>(std::ceil(6.0 / (epsilon * epsilon)));
  n = std::max<std::size_t>(n, 12);
  for (;;) {
    auto pts = fibonacci_sphere(n);
    const double r = sampled_covering_radius(pts, 0.9 * epsilon, 20000, 0x5eedULL + n);
    if (std::isfinite(r)) {
      net.points = std::move(pts);
      net.covering_radius = epsilon;
      return net;
    }
    n = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * 1.2));
  }
}

namespace {

struct ZData {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> x;          // n×d
  std::vector<signed char> sign;  // n×d, sign of w_t^i (0 on quiet coordinates)
};

ZData z_data(const Trajectory& traj) {
  ZData z;
  z.n = traj.horizon();
  z.d = traj.dim();
  z.x.resize(z.n * z.d);
  z.sign.resize(z.n * z.d);
  for (std::size_t t = 0; t < z.n; ++t) {
    for (std::size_t i = 0; i < z.d; ++i) {
      z.x[t * z.d + i] = traj.states[t][i];
      const double w = traj.disturbances[t][i];
      z.sign[t * z.d + i] = static_cast<signed char>(w > 0.0 ? 1 : (w < 0.0 ? -1 : 0));
    }
  }
  return z;
}

void accumulate_z(const ZData& z, std::span<const double> y, std::span<double> sums) {
  std::fill(sums.begin(), sums.end(), 0.0);
  for (std::size_t t = 0; t < z.n; ++t) {
    const double* xt = &z.x[t * z.d];
    double proj = 0.0;
    for (std::size_t k = 0; k < z.d; ++k) proj += y[k] * xt[k];
    const double mag = std::abs(proj);
    const signed char* st = &z.sign[t * z.d];
    for (std::size_t i = 0; i < z.d; ++i) sums[i] += st[i] == 0 ? mag : st[i] * proj;
  }
}

void check_unit(std::span<const double> y, std::size_t d) {
  if (y.size() != d) throw InvalidInput("z_sum: direction has wrong dimension");
  if (std::abs(norm2(y) - 1.0) > 1e-9) throw InvalidInput("z_sum: direction must be a unit vector");
}

}  // namespace

double z_sum(const Trajectory& traj, std::size_t i, std::span<const double> y) {
  if (i >= traj.dim()) throw InvalidInput("z_sum: coordinate out of range");
  check_unit(y, traj.dim());
  double s = 0.0;
  for (std::size_t t = 0; t < traj.horizon(); ++t) {
    const double proj = dot(y, traj.states[t]);
    const double w = traj.disturbances[t][i];
    if (w == 0.0) s += std::abs(proj);
    else if (w > 0.0) s += proj;
    else s -= proj;
  }
  return s;
}

double lipschitz_bound(const Trajectory& traj) {
  double s = 0.0;
  for (std::size_t t = 0; t < traj.horizon(); ++t) s += norm2(traj.states[t]);
  return s;
}

std::vector<double> min_z_over_serial(const Trajectory& traj, const std::vector<Vector>& points) {
  const ZData z = z_data(traj);
  std::vector<double> mins(z.d, std::numeric_limits<double>::infinity());
  std::vector<double> sums(z.d);
  for (const auto& y : points) {
    check_unit(y, z.d);
    accumulate_z(z, y, sums);
    for (std::size_t i = 0; i < z.d; ++i) mins[i] = std::min(mins[i], sums[i]);
  }
  return mins;
}

std::vector<double> min_z_over(const Trajectory& traj, const std::vector<Vector>& points) {
  const ZData z = z_data(traj);
  for (const auto& y : points) check_unit(y, z.d);
  std::vector<double> mins(z.d, std::numeric_limits<double>::infinity());
#pragma omp parallel
  {
    std::vector<double> local(z.d, std::numeric_limits<double>::infinity());
    std::vector<double> sums(z.d);
#pragma omp for schedule(static)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(points.size()); ++k) {
      accumulate_z(z, points[static_cast<std::size_t>(k)], sums);
      for (std::size_t i = 0; i < z.d; ++i) local[i] = std::min(local[i], sums[i]);
    }
#pragma omp critical
    for (std::size_t i = 0; i < z.d; ++i) mins[i] = std::min(mins[i], local[i]);
  }
  return mins;
}

namespace {

CertificateReport evaluate_net(const Trajectory& traj, const NetSpec& net, double lip) {
  CertificateReport rep;
  rep.mode = CertifyMode::Exact;
  rep.per_coordinate_min = min_z_over(traj, net.points);
  rep.lipschitz_bound = lip;
  rep.epsilon = net.epsilon;
  rep.covering_radius = net.covering_radius;
  rep.net_size = net.points.size();
  const double m = *std::min_element(rep.per_coordinate_min.begin(), rep.per_coordinate_min.end());
  rep.margin = m - net.covering_radius * lip;
  rep.certified = rep.margin > 0.0;
  return rep;
}

double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }

}  // namespace

CertificateReport certify(const Trajectory& traj, const CertifyOptions& options) {
  const std::size_t d = traj.dim();
  if (d == 0 || traj.horizon() == 0) throw InvalidInput("certify: empty trajectory");
  const double lip = lipschitz_bound(traj);

  if (options.mode == CertifyMode::Sampled) {
    if (options.samples == 0) throw InvalidInput("certify: sampled mode needs at least one direction");
    Rng rng(options.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Vector> dirs(options.samples, Vector(d));
    for (auto& y : dirs) {
      double nrm = 0.0;
      while (nrm == 0.0) {
        for (auto& v : y) v = normal(rng);
        nrm = norm2(y);
      }
      for (auto& v : y) v /= nrm;
    }
    CertificateReport rep;
    rep.mode = CertifyMode::Sampled;
    rep.per_coordinate_min = min_z_over(traj, dirs);
    rep.lipschitz_bound = lip;
    rep.net_size = dirs.size();
    rep.margin = min_of(rep.per_coordinate_min);
    rep.certified = false;
    return rep;
  }

  if (options.epsilon) return evaluate_net(traj, build_net(d, *options.epsilon), lip);
  if (d == 1) return evaluate_net(traj, build_net(1, 1.0), lip);

  // Automatic radius: coarse pass, then choose the radius that would leave
  // half the observed minimum as margin, then refine once more from the
  // finer minimum. Radii are clamped to the net budget.
  constexpr double kCoarse = 0.25;
  const double floor_eps = min_feasible_epsilon(d) * 1.0001;
  CertificateReport rep = evaluate_net(traj, build_net(d, kCoarse), lip);
  if (rep.certified || min_of(rep.per_coordinate_min) <= 0.0 || lip == 0.0) return rep;
  double eps = kCoarse;
  for (int refinement = 0; refinement < 2; ++refinement) {
    const double m = min_of(rep.per_coordinate_min);
    if (m <= 0.0) break;
    const double next = std::max(0.5 * m / lip, floor_eps);
    if (!(next < eps)) break;
    eps = next;
    rep = evaluate_net(traj, build_net(d, eps), lip);
    if (rep.certified) break;
  }
  return rep;
}

}  // namespace advsysid
