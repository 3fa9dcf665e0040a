// SPDX-License-Identifier: MIT
/// @file quadrature.hpp
/// @brief Internal adaptive 1-D Gauss/Kronrod quadrature shared by the
///        integral kernels. Not part of the public interface.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <queue>
#include <vector>

#include "oamnfc/elliptic.hpp"

namespace oamnfc::detail {

inline constexpr std::array<double, 15> kKronrodNodes1d = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,                0.207784955007898,
    0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};

inline constexpr std::array<double, 15> kKronrodWeights1d = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};

inline constexpr std::array<double, 7> kGaussWeights1d = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

/// Error estimates of the embedded rule bottom out near the rounding noise of
/// the integrand samples. Integrals whose signed parts nearly cancel can have
/// |value| orders of magnitude below the L1 norm, making a purely relative
/// tolerance unreachable; once the accumulated error estimate falls below
/// this fraction of the L1 estimate, further subdivision only chases noise
/// and the current value is accepted.
inline constexpr double kRoundoffFloor = 2.5e-11;

struct Interval1d {
  double a, b, value, error, magnitude;
};

template <typename F>
Interval1d evaluate_interval(const F& f, double a, double b) {
  const double h = 0.5 * (b - a), c = 0.5 * (b + a);
  std::array<double, 15> s{};
  for (int i = 0; i < 15; ++i) s[i] = f(c + h * kKronrodNodes1d[i]);
  double k = 0.0, l1 = 0.0;
  for (int i = 0; i < 15; ++i) {
    k += kKronrodWeights1d[i] * s[i];
    l1 += kKronrodWeights1d[i] * std::abs(s[i]);
  }
  double g = 0.0;
  for (int i = 0; i < 7; ++i) g += kGaussWeights1d[i] * s[2 * i + 1];
  return {a, b, k * h, std::abs(k - g) * h, l1 * h};
}

/// Globally adaptive 1-D quadrature of f over [a, b]; throws QuadratureError
/// when the evaluation budget runs out before reaching the tolerance.
template <typename F>
double adaptive_quad_1d(const F& f, double a, double b, double rel_tol,
                        double abs_floor = 1e-300,
                        long max_evaluations = 2'000'000) {
  auto worse = [](const Interval1d& x, const Interval1d& y) {
    return x.error < y.error;
  };
  std::priority_queue<Interval1d, std::vector<Interval1d>, decltype(worse)>
      heap(worse);
  long evals = 0;
  double total_value = 0.0, total_error = 0.0, total_magnitude = 0.0;
  auto push = [&](double lo, double hi) {
    Interval1d iv = evaluate_interval(f, lo, hi);
    evals += 15;
    total_value += iv.value;
    total_error += iv.error;
    total_magnitude += iv.magnitude;
    heap.push(iv);
  };
  const double mid = 0.5 * (a + b);
  push(a, mid);
  push(mid, b);
  while (total_error > rel_tol * std::abs(total_value) + abs_floor &&
         total_error > kRoundoffFloor * total_magnitude) {
    if (evals + 30 > max_evaluations)
      throw QuadratureError(
          "adaptive_quad_1d: evaluation budget exhausted before reaching the "
          "requested tolerance");
    Interval1d worst = heap.top();
    heap.pop();
    total_value -= worst.value;
    total_error -= worst.error;
    total_magnitude -= worst.magnitude;
    const double m = 0.5 * (worst.a + worst.b);
    push(worst.a, m);
    push(m, worst.b);
  }
  return total_value;
}

}  // namespace oamnfc::detail
