// SPDX-License-Identifier: MIT
#include <cmath>

#include <doctest.h>

#include "oamnfc/geometry.hpp"

using namespace oamnfc;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kDeg = kPi / 180.0;

LinkGeometry baseline() {
  LinkGeometry g;
  g.n_tx = 8;
  g.n_rx = 8;
  g.ring_radius_tx = 0.025;
  g.ring_radius_rx = 0.025;
  g.coil_radius_tx = 0.005;
  g.coil_radius_rx = 0.005;
  g.turns_tx = 1;
  g.turns_rx = 1;
  g.axial_distance = 0.025;
  return g;
}

}  // namespace

TEST_CASE("geometry validation accepts the baseline and rejects bad fields") {
  CHECK_NOTHROW(baseline().validate());

  LinkGeometry g = baseline();
  g.n_tx = 0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);

  g = baseline();
  g.coil_radius_tx = -1e-3;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);

  g = baseline();
  g.axial_distance = -1e-3;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);

  g = baseline();
  g.tilt_x = kPi / 2;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("geometry validation enforces the ring clearance") {
  // Eight coils on a 25 mm ring leave sin(pi/8)*25 mm = 9.57 mm of clearance.
  LinkGeometry g = baseline();
  g.coil_radius_tx = 0.0096;
  CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("overlap"),
                       std::invalid_argument);
  g.coil_radius_tx = 0.025 * std::sin(kPi / 8);  // exactly touching
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g.coil_radius_tx = 0.0095;
  CHECK_NOTHROW(g.validate());

  // A single coil has no neighbour to collide with.
  g = baseline();
  g.n_tx = 1;
  g.n_rx = 1;
  g.coil_radius_tx = 0.02;
  CHECK_NOTHROW(g.validate());
}

TEST_CASE("combined tilt angle") {
  LinkGeometry g = baseline();
  CHECK(g.tilt_total() == 0.0);
  g.tilt_x = 10 * kDeg;
  CHECK(g.tilt_total() == doctest::Approx(10 * kDeg).epsilon(1e-14));
  g.tilt_y = 17 * kDeg;
  const double want = std::atan(
      std::hypot(std::tan(10 * kDeg), std::tan(17 * kDeg)));
  CHECK(g.tilt_total() == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("aligned receiver poses sit on the shifted ring") {
  LinkGeometry g = baseline();
  const CoilPose first = receive_coil_pose(g, 0);
  CHECK(first.center.x() == doctest::Approx(0.025).epsilon(1e-15));
  CHECK(std::abs(first.center.y()) < 1e-17);
  CHECK(first.center.z() == doctest::Approx(0.025).epsilon(1e-15));
  CHECK((first.normal - Eigen::Vector3d::UnitZ()).norm() < 1e-15);

  for (int m = 0; m < g.n_rx; ++m)
    CHECK(receive_coil_pose(g, m).center.z() ==
          doctest::Approx(g.axial_distance).epsilon(1e-15));

  g.offset_x = 0.010;
  CHECK(receive_coil_pose(g, 0).center.x() ==
        doctest::Approx(0.035).epsilon(1e-15));
}

TEST_CASE("pose indices are range checked") {
  const LinkGeometry g = baseline();
  CHECK_THROWS_AS(receive_coil_pose(g, -1), std::out_of_range);
  CHECK_THROWS_AS(receive_coil_pose(g, 8), std::out_of_range);
  CHECK_THROWS_AS(transmit_coil_center(g, 8), std::out_of_range);
}

TEST_CASE("tilt about one axis matches the explicit rotation matrix") {
  LinkGeometry g = baseline();
  g.tilt_x = 10 * kDeg;
  // Tilting only the x-component carries +z toward +x: rotation about +y.
  const Eigen::Matrix3d want =
      Eigen::AngleAxisd(10 * kDeg, Eigen::Vector3d::UnitY())
          .toRotationMatrix();
  CHECK((tilt_rotation(g) - want).cwiseAbs().maxCoeff() < 1e-12);

  for (int m = 0; m < g.n_rx; ++m) {
    const double a = 2.0 * kPi * m / g.n_rx;
    const Eigen::Vector3d ring(g.ring_radius_rx * std::cos(a),
                               g.ring_radius_rx * std::sin(a), 0.0);
    const Eigen::Vector3d expect =
        want * ring + Eigen::Vector3d(0, 0, g.axial_distance);
    CHECK((receive_coil_pose(g, m).center - expect).norm() < 1e-12);
  }
}

TEST_CASE("general tilt is a proper twist-free rotation") {
  LinkGeometry g = baseline();
  g.tilt_x = 10 * kDeg;
  g.tilt_y = 17 * kDeg;
  const Eigen::Matrix3d r = tilt_rotation(g);
  CHECK((r.transpose() * r - Eigen::Matrix3d::Identity()).norm() < 1e-14);
  CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-14));

  // The rotated normal has the direction cosines dictated by the two tilt
  // components, and the rotation axis (in the z = 0 plane) is fixed.
  const double theta = g.tilt_total();
  const double cx = std::tan(g.tilt_x) / std::tan(theta);
  const double cy = std::tan(g.tilt_y) / std::tan(theta);
  const Eigen::Vector3d normal(cx * std::sin(theta), cy * std::sin(theta),
                               std::cos(theta));
  CHECK((r * Eigen::Vector3d::UnitZ() - normal).norm() < 1e-14);
  const Eigen::Vector3d axis =
      Eigen::Vector3d(-cy, cx, 0.0).normalized();
  CHECK((r * axis - axis).norm() < 1e-14);
}

TEST_CASE("tilted poses converge to aligned poses as the tilt vanishes") {
  LinkGeometry tilted = baseline();
  tilted.tilt_x = 1e-9;
  const LinkGeometry aligned = baseline();
  for (int m = 0; m < 8; ++m) {
    const double gap = (receive_coil_pose(tilted, m).center -
                        receive_coil_pose(aligned, m).center)
                           .norm();
    CHECK(gap < 1e-10);
  }
}

TEST_CASE("pair distance: coaxial zero, chord law, vertical independence") {
  LinkGeometry g = baseline();
  CHECK(pair_distance(g, 0, 0) < 1e-15);
  const double want = 0.025 * std::sqrt(2.0 - 2.0 * std::cos(kPi / 4));
  CHECK(pair_distance(g, 0, 1) == doctest::Approx(want).epsilon(1e-14));

  // The distance is to the transmit coil's vertical axis, so it must equal
  // the 3-D point-to-line distance computed with vector algebra.
  g.tilt_x = 20 * kDeg;
  g.offset_x = 0.007;
  g.offset_y = -0.004;
  for (int m = 0; m < 8; ++m)
    for (int n = 0; n < 8; ++n) {
      const Eigen::Vector3d rx = receive_coil_pose(g, m).center;
      const Eigen::Vector3d tx = transmit_coil_center(g, n);
      const double oracle =
          ((rx - tx).cross(Eigen::Vector3d::UnitZ())).norm();
      CHECK(pair_distance(g, m, n) ==
            doctest::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("pair distance shift identity for aligned stacked rings") {
  LinkGeometry g = baseline();
  g.n_rx = 16;  // two receive coils per transmit coil
  g.coil_radius_rx = 0.004;
  const int fold = g.n_rx / g.n_tx;
  for (int m = 0; m < g.n_rx; ++m)
    for (int n = 0; n < g.n_tx; ++n)
      CHECK(pair_distance(g, m, n) ==
            doctest::Approx(
                pair_distance(g, (m + fold) % g.n_rx, (n + 1) % g.n_tx))
                .epsilon(1e-12));
}

TEST_CASE("transmit-pair chord distances") {
  LinkGeometry g = baseline();
  CHECK(tx_pair_distance(g, 0, 4) == doctest::Approx(0.050).epsilon(1e-14));
  CHECK(tx_pair_distance(g, 0, 1) ==
        doctest::Approx(tx_pair_distance(g, 1, 2)).epsilon(1e-14));
  CHECK(tx_pair_distance(g, 1, 3) ==
        doctest::Approx(tx_pair_distance(g, 5, 7)).epsilon(1e-14));
  CHECK_THROWS_AS(tx_pair_distance(g, 3, 3), std::invalid_argument);

  LinkGeometry tri = baseline();
  tri.n_tx = 3;
  tri.ring_radius_tx = 0.010;
  CHECK(tx_pair_distance(tri, 0, 1) ==
        doctest::Approx(0.010 * std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("scalar pair geometry bundles distance, height and tilt") {
  LinkGeometry g = baseline();
  g.tilt_x = 5 * kDeg;
  g.offset_x = 0.003;
  const PairGeometry p = pair_geometry(g, 2, 5);
  CHECK(p.lateral_distance == doctest::Approx(pair_distance(g, 2, 5)));
  CHECK(p.axial_offset ==
        doctest::Approx(receive_coil_pose(g, 2).center.z()));
  CHECK(p.tilt == doctest::Approx(g.tilt_total()));
}
