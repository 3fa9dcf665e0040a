// SPDX-License-Identifier: MIT
#include "oamnfc/inductance.hpp"

#include <cmath>
#include <stdexcept>

#include "detail/quadrature.hpp"

namespace oamnfc {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

/// The closed forms below pair their literal prefactors with the standard
/// (half_pi) Psi; selecting the doubled convention halves the prefactor so
/// the physical value is convention-invariant.
double convention_scale(EllipticConvention c) {
  return c == EllipticConvention::half_pi ? 1.0 : 0.5;
}

/// Orthonormal in-plane basis (u, v) for a loop with unit normal n. Any
/// in-plane phase origin gives the same line integral.
void loop_basis(const Eigen::Vector3d& normal, Eigen::Vector3d* u,
                Eigen::Vector3d* v) {
  const Eigen::Vector3d n = normal.normalized();
  Eigen::Vector3d seed = std::abs(n.x()) < 0.9 ? Eigen::Vector3d::UnitX()
                                               : Eigen::Vector3d::UnitY();
  *u = n.cross(seed).normalized();
  *v = n.cross(*u);
}

void check_pair_inputs(double r_t, double r_r, int turns_t, int turns_r) {
  if (!(r_t > 0.0) || !(r_r > 0.0))
    throw std::invalid_argument("mutual inductance: coil radii must be > 0");
  if (turns_t < 1 || turns_r < 1)
    throw std::invalid_argument("mutual inductance: turn counts must be >= 1");
}

void check_pair_separation(const PairGeometry& p, double r_t, double r_r) {
  if (p.axial_offset == 0.0 && !(p.lateral_distance > r_t + r_r))
    throw std::domain_error(
        "mutual inductance: coplanar coils intersect (lateral distance must "
        "exceed the radius sum when the axial offset is zero)");
}

}  // namespace

double loop_self_inductance(double coil_radius, int turns) {
  if (!(coil_radius > 0.0))
    throw std::invalid_argument("loop_self_inductance: radius must be > 0");
  if (turns < 1)
    throw std::invalid_argument("loop_self_inductance: turns must be >= 1");
  return kMu0 * static_cast<double>(turns) * turns * kPi * coil_radius / 2.0;
}

CoilElectrical coil_electrical(const LinkGeometry& g, double frequency,
                               double resonance_frequency, double resistivity,
                               double wire_cross_section) {
  if (!(frequency > 0.0) || !(resonance_frequency > 0.0))
    throw std::invalid_argument("coil_electrical: frequencies must be > 0");
  if (!(resistivity > 0.0) || !(wire_cross_section > 0.0))
    throw std::invalid_argument(
        "coil_electrical: resistivity and wire cross-section must be > 0");
  CoilElectrical e;
  e.frequency = frequency;
  e.omega = 2.0 * kPi * frequency;
  e.resistivity = resistivity;
  e.wire_cross_section = wire_cross_section;
  e.self_inductance = loop_self_inductance(g.coil_radius_tx, g.turns_tx);
  e.resistance = 2.0 * kPi * g.coil_radius_tx * g.turns_tx * resistivity /
                 wire_cross_section;
  const double omega_res = 2.0 * kPi * resonance_frequency;
  e.capacitance = 1.0 / (omega_res * omega_res * e.self_inductance);
  e.impedance = std::complex<double>(e.resistance, 0.0) +
                std::complex<double>(0.0, e.omega * e.self_inductance) +
                1.0 / std::complex<double>(0.0, e.omega * e.capacitance);
  return e;
}

CoilElectrical coil_electrical_from_lcr(double frequency, double inductance,
                                        double capacitance,
                                        double resistance) {
  if (!(frequency > 0.0))
    throw std::invalid_argument("coil_electrical_from_lcr: frequency must be > 0");
  if (!(inductance > 0.0) || !(capacitance > 0.0) || !(resistance >= 0.0))
    throw std::invalid_argument(
        "coil_electrical_from_lcr: L and C must be > 0, R >= 0");
  CoilElectrical e;
  e.frequency = frequency;
  e.omega = 2.0 * kPi * frequency;
  e.self_inductance = inductance;
  e.capacitance = capacitance;
  e.resistance = resistance;
  e.impedance = std::complex<double>(resistance, 0.0) +
                std::complex<double>(0.0, e.omega * inductance) +
                1.0 / std::complex<double>(0.0, e.omega * capacitance);
  return e;
}

double mutual_pair_scalar(const PairGeometry& p, double r_t, double r_r,
                          int turns_t, int turns_r,
                          EllipticConvention convention) {
  check_pair_inputs(r_t, r_r, turns_t, turns_r);
  check_pair_separation(p, r_t, r_r);
  const double d_ratio = p.lateral_distance / r_r;
  const double cos_th = std::cos(p.tilt);
  const double sin_th = std::sin(p.tilt);
  const double z = p.axial_offset;

  auto kernel = [&](double phi) {
    const double cp = std::cos(phi);
    const double v2 = 1.0 + d_ratio * d_ratio - 2.0 * d_ratio * cp * cos_th -
                      cp * cp * sin_th * sin_th;
    const double v = std::sqrt(std::max(v2, 1e-300));
    const double axial = z - r_r * cp * sin_th;
    const double denom = (r_t + r_r * v) * (r_t + r_r * v) + axial * axial;
    const double k = 2.0 * std::sqrt(r_t * r_r * v / denom);
    return (cos_th - d_ratio * cp) * psi(k, convention) /
           (k * v * std::sqrt(v));
  };

  const double integral = detail::adaptive_quad_1d(kernel, 0.0, kPi, 1e-11,
                                                   1e-300, 4'000'000);
  const double prefactor = 2.0 * kMu0 * turns_t * turns_r *
                           std::sqrt(r_t * r_r) / kPi;
  return convention_scale(convention) * prefactor * integral;
}

double mutual_loops_neumann(const CoilPose& a, double r_a, int turns_a,
                            const CoilPose& b, double r_b, int turns_b,
                            double rel_tol) {
  check_pair_inputs(r_a, r_b, turns_a, turns_b);
  Eigen::Vector3d ua, va, ub, vb;
  loop_basis(a.normal, &ua, &va);
  loop_basis(b.normal, &ub, &vb);

  auto integrand = [&](double t, double phi) {
    const double ct = std::cos(t), st = std::sin(t);
    const double cp = std::cos(phi), sp = std::sin(phi);
    const Eigen::Vector3d xa = a.center + r_a * (ua * ct + va * st);
    const Eigen::Vector3d xb = b.center + r_b * (ub * cp + vb * sp);
    const Eigen::Vector3d ta = -ua * st + va * ct;
    const Eigen::Vector3d tb = -ub * sp + vb * cp;
    const double dist = (xa - xb).norm();
    if (!(dist > 0.0))
      throw std::domain_error(
          "mutual_loops_neumann: loops touch (zero filament distance)");
    return ta.dot(tb) / dist;
  };

  const QuadResult q = adaptive_quad_2d(integrand, rel_tol);
  return kMu0 * turns_a * turns_b * r_a * r_b / (4.0 * kPi) * q.value;
}

double mutual_pair_neumann(const PairGeometry& p, double r_t, double r_r,
                           int turns_t, int turns_r, double rel_tol) {
  check_pair_separation(p, r_t, r_r);
  CoilPose tx;  // origin, +z normal
  CoilPose rx;
  rx.center = Eigen::Vector3d(0.0, -p.lateral_distance, p.axial_offset);
  rx.normal = Eigen::Vector3d(0.0, std::sin(p.tilt), std::cos(p.tilt));
  return mutual_loops_neumann(tx, r_t, turns_t, rx, r_r, turns_r, rel_tol);
}

double coplanar_mutual(double center_distance, double coil_radius, int turns,
                       EllipticConvention convention) {
  check_pair_inputs(coil_radius, coil_radius, turns, turns);
  if (!(center_distance > 2.0 * coil_radius))
    throw std::domain_error(
        "coplanar_mutual: coplanar loops overlap (centre distance must "
        "exceed the diameter)");
  const double d_ratio = center_distance / coil_radius;

  auto kernel = [&](double phi) {
    const double cp = std::cos(phi);
    const double v2 = 1.0 + d_ratio * d_ratio - 2.0 * d_ratio * cp;
    const double v = std::sqrt(std::max(v2, 1e-300));
    const double k = 2.0 * std::sqrt(v) / (1.0 + v);
    return (1.0 - d_ratio * cp) * psi(k, convention) / (k * v * std::sqrt(v));
  };

  const double integral = detail::adaptive_quad_1d(kernel, 0.0, kPi, 1e-11,
                                                   1e-300, 4'000'000);
  const double prefactor =
      2.0 * kMu0 * static_cast<double>(turns) * turns * coil_radius / kPi;
  return convention_scale(convention) * prefactor * integral;
}

double mutual_tx_rx(const LinkGeometry& g, int m, int n, MutualMethod method) {
  const PairGeometry p = pair_geometry(g, m, n);
  if (method == MutualMethod::elliptic)
    return mutual_pair_scalar(p, g.coil_radius_tx, g.coil_radius_rx,
                              g.turns_tx, g.turns_rx);
  return mutual_pair_neumann(p, g.coil_radius_tx, g.coil_radius_rx,
                             g.turns_tx, g.turns_rx);
}

double mutual_tx_tx(const LinkGeometry& g, int n1, int n2) {
  if (n1 == n2)
    throw std::invalid_argument(
        "mutual_tx_tx: indices must differ (no self mutual inductance)");
  const double d = tx_pair_distance(g, n1, n2);
  return coplanar_mutual(d, g.coil_radius_tx, g.turns_tx);
}

MutualInductanceMatrix build_inductance_matrices(const LinkGeometry& g) {
  g.validate();
  MutualInductanceMatrix mi;
  mi.geometry = g;
  mi.tx_rx.resize(g.n_rx, g.n_tx);
  for (int m = 0; m < g.n_rx; ++m)
    for (int n = 0; n < g.n_tx; ++n)
      mi.tx_rx(m, n) = mutual_tx_rx(g, m, n, MutualMethod::elliptic);

  mi.tx_tx = Eigen::MatrixXd::Zero(g.n_tx, g.n_tx);
  // The transmit ring is circulant: the coupling depends only on the index
  // gap, so compute one value per gap and broadcast.
  for (int gap = 1; gap < g.n_tx; ++gap) {
    const double value = coplanar_mutual(tx_pair_distance(g, gap, 0),
                                         g.coil_radius_tx, g.turns_tx);
    for (int n = 0; n < g.n_tx; ++n) mi.tx_tx(n, (n + gap) % g.n_tx) = value;
  }
  return mi;
}

}  // namespace oamnfc
