// SPDX-License-Identifier: MIT
/// @file elliptic.hpp
/// @brief Complete elliptic integrals, the coupling kernel psi, and a
///        general-purpose adaptive 2-D quadrature.
///
/// Two conventions for the complete integrals are supported, differing only
/// in the upper limit of the defining integral: the half-period form over
/// [0, pi/2] (the standard convention) and the full form over [0, pi], which
/// is exactly twice the standard value for the same modulus.
#pragma once

#include <functional>
#include <stdexcept>

namespace oamnfc {

/// Selects the domain of the defining integrals: [0, pi/2] or [0, pi].
enum class EllipticConvention {
  half_pi,  ///< standard complete integrals over [0, pi/2]
  full_pi,  ///< doubled-domain integrals over [0, pi] (2x half_pi)
};

/// Upper integration limit of the selected convention, in radians.
double domain_upper_limit(EllipticConvention c);

/// Complete elliptic integral of the first kind,
///   K(xi) = integral of (1 - xi^2 sin^2 t)^(-1/2) over the convention domain.
/// Strictly increasing in xi. Throws std::domain_error for xi outside [0, 1)
/// or within 1e-12 of the singular endpoint.
double elliptic_K(double xi, EllipticConvention c = EllipticConvention::full_pi);

/// Complete elliptic integral of the second kind,
///   E(xi) = integral of (1 - xi^2 sin^2 t)^(1/2) over the convention domain.
/// Strictly decreasing in xi. Valid for xi in [0, 1].
double elliptic_E(double xi, EllipticConvention c = EllipticConvention::full_pi);

/// Coupling kernel psi(xi) = (1 - xi^2/2) K(xi) - E(xi).
///
/// psi(0) = 0; psi > 0 on (0,1); monotone increasing. The small-modulus
/// behaviour is quartic: psi ~ (pi/16) xi^4 under the full_pi convention
/// ((pi/32) xi^4 under half_pi). Evaluated by an exact power series for
/// xi <= 0.5 (the direct K/E combination cancels catastrophically there)
/// and by the AGM-based direct form otherwise.
double psi(double xi, EllipticConvention c = EllipticConvention::full_pi);

/// Thrown when a quadrature cannot reach the requested tolerance within its
/// evaluation budget. Never silently returns a bad value.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Result of an adaptive quadrature: the estimate, a bound on its absolute
/// error, and the number of integrand evaluations spent.
struct QuadResult {
  double value = 0.0;
  double error_bound = 0.0;
  long evaluations = 0;
};

/// Globally adaptive cubature of f over [0, 2*pi]^2.
///
/// Subdivides the worst rectangle first using an embedded Gauss/Kronrod
/// tensor rule until the accumulated error bound is below
/// rel_tol*|value| + abs_floor, or below the rounding floor of the integrand
/// (a small fraction of the accumulated L1 estimate, relevant when the
/// signed parts of the integral nearly cancel). Throws QuadratureError if
/// the budget of integrand evaluations is exhausted first.
QuadResult adaptive_quad_2d(const std::function<double(double, double)>& f,
                            double rel_tol, double abs_floor = 1e-300,
                            long max_evaluations = 50'000'000);

}  // namespace oamnfc
