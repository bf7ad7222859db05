#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "kicktop/classical.hpp"
#include "kicktop/error.hpp"

namespace {

using namespace kicktop::classical;

constexpr double kPi = std::numbers::pi;

// The map written out component by component.
ClassicalPoint explicit_map(const ClassicalPoint& q, double k, double p) {
  const double c = std::cos(p), s = std::sin(p);
  const double zr = q.z * c - q.x * s;
  const double xr = q.x * c + q.z * s;
  return {xr * std::cos(k * zr) - q.y * std::sin(k * zr),
          xr * std::sin(k * zr) + q.y * std::cos(k * zr), zr};
}

TEST(ClassicalPoint, AngleRoundTrip) {
  for (double theta : {0.2, 1.0, 2.9}) {
    for (double phi : {-3.0, -0.5, 0.0, 1.4, 3.1}) {
      const auto pt = ClassicalPoint::from_angles(theta, phi);
      EXPECT_NEAR(pt.norm(), 1.0, 1e-15);
      EXPECT_NEAR(pt.theta(), theta, 1e-13);
      EXPECT_NEAR(pt.phi(), phi, 1e-13);
    }
  }
}

TEST(ClassicalMap, MatchesComponentForm) {
  for (const auto& [k, p] : {std::pair{1.0, kPi / 2}, std::pair{2.3, 1.7}, std::pair{10.0, 0.4}}) {
    for (double theta = 0.1; theta < 3.1; theta += 0.37) {
      for (double phi = -3.0; phi < 3.1; phi += 0.53) {
        const auto pt = ClassicalPoint::from_angles(theta, phi);
        const auto a = map_step(pt, {k, p});
        const auto b = explicit_map(pt, k, p);
        EXPECT_NEAR(a.x, b.x, 1e-13);
        EXPECT_NEAR(a.y, b.y, 1e-13);
        EXPECT_NEAR(a.z, b.z, 1e-13);
      }
    }
  }
}

TEST(ClassicalMap, PreservesSphere) {
  const auto pt = iterate(ClassicalPoint::from_angles(1.1, 0.3), {6.0, 1.7}, 100000);
  EXPECT_NEAR(pt.norm(), 1.0, 1e-12);
}

TEST(ClassicalMap, RejectsPointsOffSphere) {
  EXPECT_THROW(map_step({0.0, 0.0, 1.1}, {1.0, 1.0}), kicktop::DomainError);
}

TEST(ClassicalMap, TrivialFixedPoints) {
  for (double phi : {-kPi / 2, kPi / 2}) {
    const auto pt = ClassicalPoint::from_angles(kPi / 2, phi);
    for (const auto& [k, p] : {std::pair{1.0, kPi / 2}, std::pair{5.0, 1.7}}) {
      const auto image = map_step(pt, {k, p});
      EXPECT_NEAR(image.theta(), kPi / 2, 1e-12);
      EXPECT_NEAR(image.phi(), phi, 1e-12);
    }
  }
}

TEST(ClassicalMap, AreaPreservingInCosThetaPhi) {
  for (const auto& [theta, phi] : {std::pair{0.7, 0.4}, std::pair{1.9, -2.1}, std::pair{1.2, 2.8}}) {
    const MapParameters params{3.0, 1.7};
    const auto pt = ClassicalPoint::from_angles(theta, phi);
    const double det = jacobian(pt, params).determinant();
    const double theta_image = map_step(pt, params).theta();
    EXPECT_NEAR(det * std::sin(theta_image) / std::sin(theta), 1.0, 1e-6);
  }
}

TEST(ClassicalMap, JacobianRejectsPoles) {
  EXPECT_THROW(jacobian({0.0, 0.0, 1.0}, {1.0, 1.0}), kicktop::DomainError);
}

TEST(Stability, PeriodDoublingAtHalfPi) {
  const auto start = ClassicalPoint::from_angles(kPi / 2, -kPi / 2);
  EXPECT_NEAR(stability_scan(start, 1, kPi / 2, {0.1, 3.0}, 0.01), 2.0, 1e-3);
}

TEST(Stability, ThresholdsMatchLinearization) {
  // Trace of the linearized map at (0, -+1, 0) is 2 cos p -+ k sin p.
  for (double p : {1.0, 1.3, 1.7, 2.0}) {
    const double minus_y = 2.0 / std::tan(p / 2);
    const double plus_y = 2.0 * std::tan(p / 2);
    EXPECT_NEAR(stability_scan(ClassicalPoint::from_angles(kPi / 2, -kPi / 2), 1, p,
                               {0.1, minus_y + 1.0}, 0.01),
                minus_y, 2e-4)
        << p;
    EXPECT_NEAR(stability_scan(ClassicalPoint::from_angles(kPi / 2, kPi / 2), 1, p,
                               {0.1, plus_y + 1.0}, 0.01),
                plus_y, 2e-4)
        << p;
  }
}

TEST(Stability, SecondaryBifurcation) {
  const auto seed = ClassicalPoint::from_angles(kPi / 4, kPi);
  EXPECT_NEAR(stability_scan(seed, 1, kPi / 2, {4.0, 5.0}, 0.01), std::sqrt(2.0) * kPi, 1e-3);
}

TEST(Stability, ReportsMissingLoss) {
  const auto start = ClassicalPoint::from_angles(kPi / 2, -kPi / 2);
  EXPECT_THROW(stability_scan(start, 1, kPi / 2, {0.1, 1.5}, 0.01), kicktop::NumericalError);
}

TEST(Cycles, LocatesPeriodTwoOrbit) {
  // Beyond k = 2 at p = pi/2 the point (pi/2, -pi/2) sheds a stable 2-cycle.
  const MapParameters params{2.5, kPi / 2};
  const auto c = locate_cycle(ClassicalPoint::from_angles(kPi / 2 - 0.5, -kPi / 2 + 0.3), params, 2);
  const auto back = iterate(c.point, params, 2);
  EXPECT_LT((Eigen::Vector3d(back.x - c.point.x, back.y - c.point.y, back.z - c.point.z)).norm(),
            1e-9);
  EXPECT_LE(monodromy_radius(c.point, params, 2), 1.0 + 1e-6);
}

TEST(Portrait, RegularIslandConfinesOrbit) {
  const auto centre = ClassicalPoint::from_angles(kPi / 2, -kPi / 2);
  ClassicalPoint pt = ClassicalPoint::from_angles(kPi / 2 + 0.1, -kPi / 2);
  for (int n = 0; n < 2000; ++n) {
    pt = map_step(pt, {1.0, kPi / 2});
    const double dot = pt.x * centre.x + pt.y * centre.y + pt.z * centre.z;
    ASSERT_LT(std::acos(std::min(1.0, dot)), 0.3);
  }
}

TEST(Portrait, DeterministicAndShaped) {
  const auto a = phase_portrait({3.0, kPi / 2}, 12, 40, SeedLayout::random, 9);
  const auto b = phase_portrait({3.0, kPi / 2}, 12, 40, SeedLayout::random, 9);
  ASSERT_EQ(a.size(), 12u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].points.size(), 41u);
    EXPECT_EQ(a[i].points.back().x, b[i].points.back().x);
  }
  std::ostringstream out;
  write_portrait_csv(out, phase_portrait({1.0, kPi / 2}, 4, 0, SeedLayout::grid));
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "orbit_id,step,theta,phi");
}

}  // namespace
