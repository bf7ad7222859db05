#include "kicktop/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include "kicktop/csv.hpp"
#include "kicktop/error.hpp"
#include "kicktop/random.hpp"

namespace kicktop::classical {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSphereTolerance = 1e-9;
constexpr double kPoleGuard = 1e-8;

ClassicalPoint normalized(double x, double y, double z) {
  const double n = std::sqrt(x * x + y * y + z * z);
  return {x / n, y / n, z / n};
}

Eigen::Vector2d angles_of(const ClassicalPoint& pt) { return {pt.theta(), pt.phi()}; }

ClassicalPoint point_of(const Eigen::Vector2d& a) { return ClassicalPoint::from_angles(a(0), a(1)); }

// T^period in angle coordinates.
Eigen::Vector2d iterate_angles(const Eigen::Vector2d& a, MapParameters params, int period) {
  return angles_of(iterate(point_of(a), params, period));
}

Eigen::Vector2d angular_difference(const Eigen::Vector2d& to, const Eigen::Vector2d& from) {
  return {to(0) - from(0), wrap_angle(to(1) - from(1))};
}

double spectral_radius(const Eigen::Matrix2d& m) {
  const double tr = m.trace();
  const double det = m.determinant();
  const double disc = tr * tr - 4.0 * det;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    return std::max(std::abs(0.5 * (tr + s)), std::abs(0.5 * (tr - s)));
  }
  return std::sqrt(std::abs(det));  // complex pair of modulus sqrt(det)
}

}  // namespace

ClassicalPoint ClassicalPoint::from_angles(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

double ClassicalPoint::theta() const { return std::acos(std::clamp(z / norm(), -1.0, 1.0)); }

double ClassicalPoint::phi() const { return wrap_angle(std::atan2(y, x)); }

double ClassicalPoint::norm() const { return std::sqrt(x * x + y * y + z * z); }

double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

ClassicalPoint map_step(const ClassicalPoint& pt, MapParameters params) {
  if (std::abs(pt.norm() - 1.0) > kSphereTolerance) {
    throw DomainError("classical point is off the unit sphere");
  }
  const double c = std::cos(params.p);
  const double s = std::sin(params.p);
  const double xr = pt.x * c + pt.z * s;
  const double zr = pt.z * c - pt.x * s;
  const double twist = params.k * zr;
  const double ct = std::cos(twist);
  const double st = std::sin(twist);
  return normalized(xr * ct - pt.y * st, xr * st + pt.y * ct, zr);
}

ClassicalPoint iterate(ClassicalPoint pt, MapParameters params, int steps) {
  for (int i = 0; i < steps; ++i) pt = map_step(pt, params);
  return pt;
}

std::vector<OrbitRecord> phase_portrait(MapParameters params, int n_seeds, int n_steps,
                                        SeedLayout layout, std::uint64_t seed) {
  if (n_seeds < 1) throw DomainError("n_seeds must be >= 1");
  if (n_steps < 0) throw DomainError("n_steps must be >= 0");

  std::vector<ClassicalPoint> seeds;
  seeds.reserve(n_seeds);
  if (layout == SeedLayout::grid) {
    const int n_theta = std::max(1, static_cast<int>(std::lround(std::sqrt(n_seeds / 2.0))));
    const int n_phi = (n_seeds + n_theta - 1) / n_theta;
    for (int i = 0; i < n_seeds; ++i) {
      const int it = i / n_phi;
      const int ip = i % n_phi;
      const double theta = kPi * (it + 0.5) / n_theta;
      const double phi = -kPi + 2.0 * kPi * (ip + 0.5) / n_phi;
      seeds.push_back(ClassicalPoint::from_angles(theta, phi));
    }
  } else {
    Rng rng = make_stream(seed, 0);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int i = 0; i < n_seeds; ++i) {
      const double z = unit(rng);
      const double phi = kPi * unit(rng);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      seeds.push_back(normalized(r * std::cos(phi), r * std::sin(phi), z));
    }
  }

  std::vector<OrbitRecord> orbits;
  orbits.reserve(n_seeds);
  for (const auto& s : seeds) {
    OrbitRecord orbit{params, {}};
    orbit.points.reserve(static_cast<std::size_t>(n_steps) + 1);
    orbit.points.push_back(s);
    for (int t = 0; t < n_steps; ++t) orbit.points.push_back(map_step(orbit.points.back(), params));
    orbits.push_back(std::move(orbit));
  }
  return orbits;
}

void write_portrait_csv(std::ostream& out, const std::vector<OrbitRecord>& orbits) {
  out << "orbit_id,step,theta,phi\n";
  for (std::size_t id = 0; id < orbits.size(); ++id) {
    const auto& pts = orbits[id].points;
    for (std::size_t t = 0; t < pts.size(); ++t) {
      out << id << ',' << t << ',' << csv::format_number(pts[t].theta()) << ','
          << csv::format_number(pts[t].phi()) << '\n';
    }
  }
}

Eigen::Matrix2d jacobian(const ClassicalPoint& pt, MapParameters params, int period, double h) {
  if (period < 1) throw DomainError("period must be >= 1");
  const Eigen::Vector2d a = angles_of(pt);
  if (std::sin(a(0)) <= kPoleGuard) {
    throw DomainError("Jacobian undefined at the poles (sin(theta) <= 1e-8)");
  }
  Eigen::Matrix2d jac;
  for (int col = 0; col < 2; ++col) {
    Eigen::Vector2d step = Eigen::Vector2d::Zero();
    step(col) = h;
    const Eigen::Vector2d fwd = iterate_angles(a + step, params, period);
    const Eigen::Vector2d bwd = iterate_angles(a - step, params, period);
    jac.col(col) = angular_difference(fwd, bwd) / (2.0 * h);
  }
  return jac;
}

double monodromy_radius(const ClassicalPoint& pt, MapParameters params, int period) {
  return spectral_radius(jacobian(pt, params, period));
}

CycleLocation locate_cycle(const ClassicalPoint& seed, MapParameters params, int period,
                           double tolerance, int max_iterations) {
  if (period < 1) throw DomainError("period must be >= 1");
  Eigen::Vector2d a = angles_of(seed);
  auto residual_at = [&](const Eigen::Vector2d& at) {
    return angular_difference(iterate_angles(at, params, period), at);
  };
  Eigen::Vector2d r = residual_at(a);
  CycleLocation loc;
  for (int it = 0; it < max_iterations && r.norm() > tolerance; ++it) {
    const Eigen::Matrix2d g =
        jacobian(point_of(a), params, period) - Eigen::Matrix2d::Identity();
    const Eigen::Vector2d delta = -g.fullPivLu().solve(r);
    if (!delta.allFinite()) break;
    // Halve the step until the residual decreases.
    double lambda = 1.0;
    Eigen::Vector2d trial = a + delta;
    Eigen::Vector2d r_trial = residual_at(trial);
    while (r_trial.norm() >= r.norm() && lambda > 1e-6) {
      lambda *= 0.5;
      trial = a + lambda * delta;
      r_trial = residual_at(trial);
    }
    if (r_trial.norm() >= r.norm()) break;
    a = trial;
    r = r_trial;
    loc.iterations = it + 1;
  }
  loc.point = point_of(a);
  loc.residual = r.norm();
  if (!(loc.residual <= tolerance)) {
    throw NumericalError("cycle location did not converge (residual " +
                         std::to_string(loc.residual) + ")");
  }
  return loc;
}

double stability_scan(const ClassicalPoint& seed, int period, double p, KInterval k_range,
                      double dk) {
  if (!(dk > 0.0) || !(k_range.hi > k_range.lo)) {
    throw DomainError("stability_scan needs dk > 0 and a non-empty k range");
  }
  constexpr double kThreshold = 1.0 + 1e-6;
  constexpr double kBisectWidth = 1e-4;
  constexpr double kCycleTolerance = 1e-10;

  auto track = [&](const ClassicalPoint& from, double k) {
    const CycleLocation loc = locate_cycle(from, {k, p}, period, kCycleTolerance);
    if (loc.residual > 1e-8) throw NumericalError("cycle lost during continuation");
    return loc.point;
  };

  ClassicalPoint stable = track(seed, k_range.lo);
  if (monodromy_radius(stable, {k_range.lo, p}, period) > kThreshold) {
    throw NumericalError("cycle is already unstable at the start of the k range");
  }
  double k_stable = k_range.lo;
  const int steps = static_cast<int>(std::ceil((k_range.hi - k_range.lo) / dk));
  for (int i = 1; i <= steps; ++i) {
    const double k = std::min(k_range.hi, k_range.lo + i * dk);
    const ClassicalPoint here = track(stable, k);
    if (monodromy_radius(here, {k, p}, period) <= kThreshold) {
      stable = here;
      k_stable = k;
      continue;
    }
    double lo = k_stable;
    double hi = k;
    while (hi - lo >= kBisectWidth) {
      const double mid = 0.5 * (lo + hi);
      const ClassicalPoint at = track(stable, mid);
      if (monodromy_radius(at, {mid, p}, period) <= kThreshold) {
        lo = mid;
        stable = at;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }
  throw NumericalError("no stability loss in range");
}

}  // namespace kicktop::classical
