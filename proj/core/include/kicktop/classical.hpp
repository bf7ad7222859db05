#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace kicktop::classical {

// Point on the unit sphere of classical spin directions.
struct ClassicalPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;

  static ClassicalPoint from_angles(double theta, double phi);
  double theta() const;
  // Azimuth wrapped to (-pi, pi].
  double phi() const;
  double norm() const;
};

struct MapParameters {
  double k = 0.0;
  double p = 0.0;
};

// One kick period: precession by p about y, then torsion about z by k Z'.
// Throws DomainError if the input is off the sphere by more than 1e-9.
ClassicalPoint map_step(const ClassicalPoint& pt, MapParameters params);
ClassicalPoint iterate(ClassicalPoint pt, MapParameters params, int steps);

struct OrbitRecord {
  MapParameters params;
  std::vector<ClassicalPoint> points;  // seed first
};

enum class SeedLayout { grid, random };

// n_steps = 0 yields orbits holding only their seed. Grid seeds cover the
// sphere on a near-square (theta, phi) lattice; random seeds are uniform on
// the sphere and determined by `seed`.
std::vector<OrbitRecord> phase_portrait(MapParameters params, int n_seeds, int n_steps,
                                        SeedLayout layout, std::uint64_t seed = 0);

// "orbit_id,step,theta,phi" rows.
void write_portrait_csv(std::ostream& out, const std::vector<OrbitRecord>& orbits);

// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

// Jacobian of the period-th iterate in (theta, phi) coordinates by central
// differences with step h. Throws DomainError when sin(theta) <= 1e-8.
Eigen::Matrix2d jacobian(const ClassicalPoint& pt, MapParameters params, int period = 1,
                         double h = 1e-6);

// Largest eigenvalue modulus of the period-th iterate's Jacobian.
double monodromy_radius(const ClassicalPoint& pt, MapParameters params, int period = 1);

struct CycleLocation {
  ClassicalPoint point;
  double residual = 0.0;  // angular distance between pt and its period-th image
  int iterations = 0;
};

// Damped Newton on F(a) = T^period(a) - a in (theta, phi), seeded at `seed`,
// converged to `tolerance` in the residual. Throws NumericalError if the
// iteration stalls.
CycleLocation locate_cycle(const ClassicalPoint& seed, MapParameters params, int period,
                           double tolerance = 1e-10, int max_iterations = 100);

struct KInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// Follows the period-`period` cycle through `seed` across k_range in steps of
// dk (re-locating it at each k) and returns the first k at which the
// monodromy radius exceeds 1 + 1e-6, bisected to |dk| < 1e-4. Throws
// NumericalError("no stability loss in range") otherwise.
double stability_scan(const ClassicalPoint& seed, int period, double p, KInterval k_range,
                      double dk);

}  // namespace kicktop::classical
