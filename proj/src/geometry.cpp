// SPDX-License-Identifier: MIT
#include "oamnfc/geometry.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace oamnfc {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("geometry: " + what);
}

/// Unit in-plane direction of the tilt axis together with the direction
/// cosines (c_x, c_y) of the tilted normal's horizontal projection. Only
/// meaningful when tilt_total() > 0.
void tilt_direction(const LinkGeometry& g, double theta, double* c_x,
                    double* c_y) {
  const double t = std::tan(theta);
  *c_x = std::tan(g.tilt_x) / t;
  *c_y = std::tan(g.tilt_y) / t;
}

}  // namespace

void LinkGeometry::validate() const {
  require(n_tx >= 1, "n_tx must be >= 1");
  require(n_rx >= 1, "n_rx must be >= 1");
  require(ring_radius_tx > 0.0, "ring_radius_tx must be > 0");
  require(ring_radius_rx > 0.0, "ring_radius_rx must be > 0");
  require(coil_radius_tx > 0.0, "coil_radius_tx must be > 0");
  require(coil_radius_rx > 0.0, "coil_radius_rx must be > 0");
  require(turns_tx >= 1, "turns_tx must be >= 1");
  require(turns_rx >= 1, "turns_rx must be >= 1");
  require(axial_distance >= 0.0, "axial_distance must be >= 0");
  require(std::abs(tilt_x) < 0.5 * kPi, "tilt_x must lie in (-pi/2, pi/2)");
  require(std::abs(tilt_y) < 0.5 * kPi, "tilt_y must lie in (-pi/2, pi/2)");

  auto check_ring = [](int n, double ring_r, double coil_r, const char* side) {
    if (n <= 1) return;
    const double clearance = ring_r * std::sin(kPi / n);
    if (!(coil_r < clearance)) {
      std::ostringstream msg;
      msg << "geometry: " << side << " coils overlap: coil radius " << coil_r
          << " m must be smaller than ring_radius*sin(pi/N) = " << clearance
          << " m for N = " << n;
      throw std::invalid_argument(msg.str());
    }
  };
  check_ring(n_tx, ring_radius_tx, coil_radius_tx, "transmitter");
  check_ring(n_rx, ring_radius_rx, coil_radius_rx, "receiver");
}

double LinkGeometry::tilt_total() const {
  if (tilt_x == 0.0 && tilt_y == 0.0) return 0.0;
  const double tx = std::tan(tilt_x);
  const double ty = std::tan(tilt_y);
  return std::atan(std::sqrt(tx * tx + ty * ty));
}

Eigen::Matrix3d tilt_rotation(const LinkGeometry& g) {
  const double theta = g.tilt_total();
  if (theta == 0.0) return Eigen::Matrix3d::Identity();
  double c_x = 0.0, c_y = 0.0;
  tilt_direction(g, theta, &c_x, &c_y);
  // Axis perpendicular to the horizontal projection of the target normal;
  // rotating about it carries +z onto (c_x sin, c_y sin, cos) with no twist.
  const Eigen::Vector3d axis(-c_y, c_x, 0.0);
  return Eigen::AngleAxisd(theta, axis.normalized()).toRotationMatrix();
}

Eigen::Vector3d transmit_coil_center(const LinkGeometry& g, int n) {
  if (n < 0 || n >= g.n_tx)
    throw std::out_of_range("transmit_coil_center: index out of range");
  const double a = 2.0 * kPi * n / g.n_tx;
  return {g.ring_radius_tx * std::cos(a), g.ring_radius_tx * std::sin(a), 0.0};
}

CoilPose receive_coil_pose(const LinkGeometry& g, int m) {
  if (m < 0 || m >= g.n_rx)
    throw std::out_of_range("receive_coil_pose: index out of range");
  const double a = 2.0 * kPi * m / g.n_rx;
  const Eigen::Vector3d ring_point(g.ring_radius_rx * std::cos(a),
                                   g.ring_radius_rx * std::sin(a), 0.0);
  const Eigen::Matrix3d rot = tilt_rotation(g);
  const Eigen::Vector3d shift(g.offset_x, g.offset_y, g.axial_distance);
  CoilPose pose;
  pose.center = rot * ring_point + shift;
  pose.normal = rot * Eigen::Vector3d::UnitZ();
  return pose;
}

double pair_distance(const LinkGeometry& g, int m, int n) {
  const Eigen::Vector3d tx = transmit_coil_center(g, n);
  const Eigen::Vector3d rx = receive_coil_pose(g, m).center;
  const double dx = rx.x() - tx.x();
  const double dy = rx.y() - tx.y();
  return std::sqrt(dx * dx + dy * dy);
}

double tx_pair_distance(const LinkGeometry& g, int n1, int n2) {
  if (n1 < 0 || n1 >= g.n_tx || n2 < 0 || n2 >= g.n_tx)
    throw std::out_of_range("tx_pair_distance: index out of range");
  if (n1 == n2)
    throw std::invalid_argument(
        "tx_pair_distance: self-distance of a coil is undefined");
  const double delta = 2.0 * kPi * (n1 - n2) / g.n_tx;
  return g.ring_radius_tx * std::sqrt(std::max(0.0, 2.0 - 2.0 * std::cos(delta)));
}

PairGeometry pair_geometry(const LinkGeometry& g, int m, int n) {
  PairGeometry p;
  p.lateral_distance = pair_distance(g, m, n);
  p.axial_offset = receive_coil_pose(g, m).center.z();
  p.tilt = g.tilt_total();
  return p;
}

}  // namespace oamnfc
