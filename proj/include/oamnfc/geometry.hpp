// SPDX-License-Identifier: MIT
/// @file geometry.hpp
/// @brief Coil-array layout: ring placement, receiver misalignment (lateral
///        offset and tilt), and the scalar pair geometry consumed by the
///        mutual-inductance kernels.
///
/// Both arrays place their coils uniformly on a circle ("ring"). The
/// transmitter ring lies in the z = 0 plane centred on the origin; the
/// receiver ring is nominally parallel at height `axial_distance`, and may be
/// displaced laterally by (offset_x, offset_y) and tilted by (tilt_x, tilt_y).
/// The tilt is realised as a single rotation that carries the +z normal onto
/// the tilted normal without twisting the ring about its own axis.
#pragma once

#include <Eigen/Dense>

namespace oamnfc {

/// Full description of one transmitter/receiver coil-array pair. All lengths
/// are metres, all angles radians.
struct LinkGeometry {
  int n_tx = 4;                  ///< number of transmitter coils
  int n_rx = 4;                  ///< number of receiver coils
  double ring_radius_tx = 0.05;  ///< transmitter ring radius R_t
  double ring_radius_rx = 0.05;  ///< receiver ring radius R_r
  double coil_radius_tx = 0.005;  ///< individual transmitter coil radius r_t
  double coil_radius_rx = 0.005;  ///< individual receiver coil radius r_r
  int turns_tx = 1;              ///< turns per transmitter coil K_t
  int turns_rx = 1;              ///< turns per receiver coil K_r
  double axial_distance = 0.02;  ///< array separation D along +z
  double offset_x = 0.0;         ///< receiver lateral offset d_x
  double offset_y = 0.0;         ///< receiver lateral offset d_y
  double tilt_x = 0.0;           ///< receiver tilt component about x
  double tilt_y = 0.0;           ///< receiver tilt component about y

  /// Throws std::invalid_argument when any field is out of range or when
  /// adjacent coils on either ring would overlap
  /// (requires coil_radius < ring_radius * sin(pi/N) whenever N > 1).
  void validate() const;

  /// Combined tilt angle theta = atan(sqrt(tan^2 tilt_x + tan^2 tilt_y)).
  double tilt_total() const;
};

/// Position and unit normal of a single coil.
struct CoilPose {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
};

/// Scalar reduction of one transmit/receive coil pair: everything the
/// closed-form mutual-inductance kernel needs.
struct PairGeometry {
  double lateral_distance = 0.0;  ///< horizontal distance d between centres
  double axial_offset = 0.0;      ///< receiver-centre height z above z = 0
  double tilt = 0.0;              ///< receiver tilt angle theta
};

/// Rotation carrying the +z axis onto the tilted receiver normal without
/// twist about the ring axis. Identity when both tilt components vanish.
Eigen::Matrix3d tilt_rotation(const LinkGeometry& g);

/// Centre of transmitter coil n (0-based); lies on the z = 0 ring at angle
/// 2*pi*n/n_tx.
Eigen::Vector3d transmit_coil_center(const LinkGeometry& g, int n);

/// Pose of receiver coil m (0-based): ring point at angle 2*pi*m/n_rx,
/// rotated by the tilt about the ring centre, then translated by
/// (offset_x, offset_y, axial_distance).
CoilPose receive_coil_pose(const LinkGeometry& g, int m);

/// Horizontal (xy-plane) distance between receiver coil m and transmitter
/// coil n; the axial component is excluded by construction.
double pair_distance(const LinkGeometry& g, int m, int n);

/// Chord distance between transmitter coils n1 and n2 on their shared ring:
/// R_t * sqrt(2 - 2 cos(2*pi*(n1 - n2)/n_tx)). Throws when n1 == n2.
double tx_pair_distance(const LinkGeometry& g, int n1, int n2);

/// The scalar triple (d, z, theta) for a receive/transmit coil pair.
PairGeometry pair_geometry(const LinkGeometry& g, int m, int n);

}  // namespace oamnfc
