// SPDX-License-Identifier: MIT
/// @file inductance.hpp
/// @brief Mutual inductance between coils (closed elliptic-integral form and
///        a raw double-integral oracle), loop self-inductance, and the lumped
///        electrical model of a resonant coil.
///
/// Two independent evaluation routes are provided for every mutual
/// inductance: a fast 1-D integral built on complete elliptic integrals, and
/// the raw line-line double integral evaluated by adaptive cubature. The two
/// must agree; the double integral is the arbiter of constants and signs.
#pragma once

#include <complex>
#include <optional>

#include <Eigen/Dense>

#include "oamnfc/elliptic.hpp"
#include "oamnfc/geometry.hpp"

namespace oamnfc {

/// Vacuum permeability, H/m.
inline constexpr double kMu0 = 1.25663706212e-6;

/// Selects the evaluation route for a mutual inductance.
enum class MutualMethod {
  elliptic,  ///< closed-form 1-D integral (fast, default)
  neumann,   ///< raw double line integral via adaptive cubature (oracle)
};

/// Lumped series model of one resonant coil: R + 1/(jwC) + jwL.
struct CoilElectrical {
  double frequency = 13.56e6;        ///< operating frequency f, Hz
  double omega = 0.0;                ///< 2*pi*f, rad/s
  double self_inductance = 0.0;      ///< L, henries
  double capacitance = 0.0;          ///< series C, farads
  double resistance = 0.0;           ///< series R, ohms
  double resistivity = 1.75e-8;      ///< wire resistivity, ohm*m
  double wire_cross_section = 5e-8;  ///< wire cross-section, m^2
  std::complex<double> impedance{0.0, 0.0};  ///< Z at the operating frequency
};

/// Mutual-inductance matrices of a link: receive-side couplings and the
/// transmit-side crosstalk couplings.
struct MutualInductanceMatrix {
  Eigen::MatrixXd tx_rx;  ///< N_r x N_t, henries
  Eigen::MatrixXd tx_tx;  ///< N_t x N_t, henries, zero diagonal, symmetric
  std::optional<LinkGeometry> geometry;  ///< pose the couplings came from
};

/// Self-inductance of a small multi-turn loop: mu0 * turns^2 * pi * r / 2.
double loop_self_inductance(double coil_radius, int turns);

/// Electrical model derived from closed forms: L from loop_self_inductance,
/// R = 2*pi*r*K*rho/S, C chosen so the series branch resonates at
/// resonance_frequency (C = 1/(w_res^2 L)), and Z assembled at `frequency`.
/// Uses the transmit-side coil radius and turn count of `g`.
CoilElectrical coil_electrical(const LinkGeometry& g, double frequency,
                               double resonance_frequency, double resistivity,
                               double wire_cross_section);

/// Electrical model from explicitly given lumped values.
CoilElectrical coil_electrical_from_lcr(double frequency, double inductance,
                                        double capacitance, double resistance);

/// Closed-form mutual inductance of a transmit/receive pair described by the
/// scalar triple (lateral distance d, axial offset z, receiver tilt theta):
///
///   M = s_c * (2 mu0 K_t K_r sqrt(r_t r_r) / pi) *
///       integral_0^pi [cos(theta) - (d/r_r) cos(phi)] * Psi(k)
///                     / (k * V^(3/2)) d phi,
///   V  = sqrt(1 + (d/r_r)^2 - 2 (d/r_r) cos(phi) cos(theta)
///             - cos^2(phi) sin^2(theta)),
///   k  = 2 sqrt(r_t r_r V / ((r_t + r_r V)^2 + (z - r_r cos(phi) sin(theta))^2)).
///
/// The convention scale s_c keeps the value invariant under the Psi
/// convention choice (s_c = 1 for half_pi, 1/2 for full_pi, since the full
/// form doubles Psi). The scalar model places the lateral displacement
/// opposite the tilt direction; the double-integral oracle below realises
/// exactly that pose.
double mutual_pair_scalar(
    const PairGeometry& p, double r_t, double r_r, int turns_t, int turns_r,
    EllipticConvention convention = EllipticConvention::full_pi);

/// Double-integral oracle for the same scalar pair model: transmit loop
/// centred at the origin with +z normal, receive loop centred at
/// (0, -d, z) with normal (0, sin theta, cos theta).
double mutual_pair_neumann(const PairGeometry& p, double r_t, double r_r,
                           int turns_t, int turns_r, double rel_tol = 1e-6);

/// Raw double line integral between two arbitrarily posed circular loops:
///   M = (mu0 K_a K_b r_a r_b / 4 pi) *
///       integral over both loop angles of (tangent_a . tangent_b) / distance.
/// Convention-free; the in-plane phase origin of either loop is irrelevant.
double mutual_loops_neumann(const CoilPose& a, double r_a, int turns_a,
                            const CoilPose& b, double r_b, int turns_b,
                            double rel_tol = 1e-6);

/// Closed-form mutual inductance of two equal coplanar loops of radius r
/// whose centres are `center_distance` apart:
///
///   M = s_c * (2 mu0 K^2 r / pi) *
///       integral_0^pi [1 - (d/r) cos(phi)] * Psi(k) / (k * V^(3/2)) d phi,
///   V = sqrt(1 + (d/r)^2 - 2 (d/r) cos(phi)),   k = 2 sqrt(V) / (1 + V).
///
/// Negative for separated coplanar loops (opposing flux linkage).
double coplanar_mutual(double center_distance, double coil_radius, int turns,
                       EllipticConvention convention = EllipticConvention::full_pi);

/// Mutual inductance between receive coil m and transmit coil n of a link.
double mutual_tx_rx(const LinkGeometry& g, int m, int n,
                    MutualMethod method = MutualMethod::elliptic);

/// Transmit-side mutual inductance between distinct coils n1 and n2.
/// Throws std::invalid_argument when n1 == n2 (self term is not a mutual).
double mutual_tx_tx(const LinkGeometry& g, int n1, int n2);

/// Fills the full coupling matrices with the closed-form route; the
/// transmit-side diagonal is zero by definition.
MutualInductanceMatrix build_inductance_matrices(const LinkGeometry& g);

}  // namespace oamnfc
