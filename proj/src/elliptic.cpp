// SPDX-License-Identifier: MIT
#include "oamnfc/elliptic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace oamnfc {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void check_modulus_first_kind(double xi) {
  if (!(xi >= 0.0)) throw std::domain_error("elliptic modulus must be >= 0");
  if (!(xi < 1.0 - 1e-12))
    throw std::domain_error("elliptic modulus too close to singular endpoint 1");
}

/// One AGM descent; returns the final arithmetic mean and accumulates
/// sum_{n>=0} 2^{n-1} c_n^2 with c_0 = xi (used by E).
double agm(double xi, double* c_square_sum) {
  double a = 1.0;
  double b = std::sqrt((1.0 - xi) * (1.0 + xi));
  double c = xi;
  double sum = 0.5 * c * c;
  double scale = 0.5;
  for (int i = 0; i < 64 && std::abs(c) > 1e-18 * a; ++i) {
    c = 0.5 * (a - b);
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
    scale *= 2.0;
    sum += scale * c * c;
  }
  if (c_square_sum) *c_square_sum = sum;
  return a;
}

double K_standard(double xi) { return 0.5 * kPi / agm(xi, nullptr); }

double E_standard(double xi) {
  if (xi >= 1.0) return 1.0;  // exact limit of the defining integral
  double sum = 0.0;
  const double a = agm(xi, &sum);
  const double K = 0.5 * kPi / a;
  return K * (1.0 - sum);
}

/// Power series for the standard-convention psi, exact coefficients:
///   psi = (pi/2) * sum_{n>=2} b_n xi^{2n},
///   b_n = c_n * 2n/(2n-1) - c_{n-1}/2,   c_n = [(2n)! / (2^{2n} (n!)^2)]^2.
/// b_1 vanishes identically; the leading term is (pi/32) xi^4.
double psi_series_standard(double xi) {
  const double x2 = xi * xi;
  double c_prev = 0.25;  // c_1
  double xpow = x2 * x2;
  double total = 0.0;
  for (int n = 2; n <= 40; ++n) {
    const double ratio = (2.0 * n - 1.0) / (2.0 * n);
    const double c_n = c_prev * ratio * ratio;
    const double b_n = c_n * (2.0 * n) / (2.0 * n - 1.0) - 0.5 * c_prev;
    const double term = b_n * xpow;
    total += term;
    if (std::abs(term) < 1e-18 * std::abs(total)) break;
    c_prev = c_n;
    xpow *= x2;
  }
  return 0.5 * kPi * total;
}

// ---------------------------------------------------------------------------
// Adaptive cubature: embedded 7-point Gauss / 15-point Kronrod tensor rule.
// Nodes/weights on [-1, 1] (Kronrod K15 with embedded G7).
// ---------------------------------------------------------------------------

constexpr std::array<double, 15> kKronrodNodes = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,                0.207784955007898,
    0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};

constexpr std::array<double, 15> kKronrodWeights = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};

// Gauss weights aligned with the odd Kronrod node indices (1,3,...,13).
constexpr std::array<double, 7> kGaussWeights = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

/// See detail::kRoundoffFloor: error estimates below this fraction of the L1
/// estimate are rounding noise, so subdivision stops there even when a
/// cancellation-dominated integral cannot meet the relative tolerance.
constexpr double kRoundoffFloor2d = 2.5e-11;

struct Region {
  double tx0, tx1, ty0, ty1;  // rectangle bounds
  double value;               // Kronrod tensor estimate
  double error;               // |K - G| tensor estimate
  double magnitude;           // Kronrod tensor estimate of |f|
};

Region evaluate_region(const std::function<double(double, double)>& f,
                       double tx0, double tx1, double ty0, double ty1) {
  const double hx = 0.5 * (tx1 - tx0), cx = 0.5 * (tx1 + tx0);
  const double hy = 0.5 * (ty1 - ty0), cy = 0.5 * (ty1 + ty0);
  std::array<std::array<double, 15>, 15> samples{};
  for (int i = 0; i < 15; ++i)
    for (int j = 0; j < 15; ++j)
      samples[i][j] = f(cx + hx * kKronrodNodes[i], cy + hy * kKronrodNodes[j]);

  double kk = 0.0;  // Kronrod x Kronrod
  double l1 = 0.0;
  for (int i = 0; i < 15; ++i) {
    double row = 0.0, arow = 0.0;
    for (int j = 0; j < 15; ++j) {
      row += kKronrodWeights[j] * samples[i][j];
      arow += kKronrodWeights[j] * std::abs(samples[i][j]);
    }
    kk += kKronrodWeights[i] * row;
    l1 += kKronrodWeights[i] * arow;
  }
  double gg = 0.0;  // Gauss x Gauss (odd node indices)
  for (int i = 0; i < 7; ++i) {
    double row = 0.0;
    for (int j = 0; j < 7; ++j)
      row += kGaussWeights[j] * samples[2 * i + 1][2 * j + 1];
    gg += kGaussWeights[i] * row;
  }
  Region r{tx0, tx1, ty0, ty1, kk * hx * hy, std::abs(kk - gg) * hx * hy,
           l1 * hx * hy};
  return r;
}

}  // namespace

double domain_upper_limit(EllipticConvention c) {
  return c == EllipticConvention::full_pi ? kPi : 0.5 * kPi;
}

double elliptic_K(double xi, EllipticConvention c) {
  check_modulus_first_kind(xi);
  const double k = K_standard(xi);
  return c == EllipticConvention::full_pi ? 2.0 * k : k;
}

double elliptic_E(double xi, EllipticConvention c) {
  if (!(xi >= 0.0) || !(xi <= 1.0))
    throw std::domain_error("elliptic modulus must lie in [0, 1]");
  const double e = E_standard(xi);
  return c == EllipticConvention::full_pi ? 2.0 * e : e;
}

double psi(double xi, EllipticConvention c) {
  check_modulus_first_kind(xi);
  double value;
  if (xi <= 0.5) {
    value = psi_series_standard(xi);
  } else {
    value = (1.0 - 0.5 * xi * xi) * K_standard(xi) - E_standard(xi);
  }
  return c == EllipticConvention::full_pi ? 2.0 * value : value;
}

QuadResult adaptive_quad_2d(const std::function<double(double, double)>& f,
                            double rel_tol, double abs_floor,
                            long max_evaluations) {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be > 0");
  const double two_pi = 2.0 * kPi;

  auto worse = [](const Region& a, const Region& b) { return a.error < b.error; };
  std::priority_queue<Region, std::vector<Region>, decltype(worse)> heap(worse);

  long evals = 0;
  auto push_region = [&](double x0, double x1, double y0, double y1) {
    heap.push(evaluate_region(f, x0, x1, y0, y1));
    evals += 15 * 15;
  };
  // Initial 2x2 split avoids symmetric-cancellation blind spots of a single
  // whole-domain panel.
  push_region(0.0, kPi, 0.0, kPi);
  push_region(kPi, two_pi, 0.0, kPi);
  push_region(0.0, kPi, kPi, two_pi);
  push_region(kPi, two_pi, kPi, two_pi);

  double total_value = 0.0, total_error = 0.0, total_magnitude = 0.0;
  {
    std::vector<Region> init;
    while (!heap.empty()) {
      init.push_back(heap.top());
      heap.pop();
    }
    for (const Region& r : init) {
      total_value += r.value;
      total_error += r.error;
      total_magnitude += r.magnitude;
      heap.push(r);
    }
  }

  while (total_error > rel_tol * std::abs(total_value) + abs_floor &&
         total_error > kRoundoffFloor2d * total_magnitude) {
    if (evals + 4 * 15 * 15 > max_evaluations) {
      throw QuadratureError(
          "adaptive_quad_2d: evaluation budget exhausted before reaching the "
          "requested tolerance");
    }
    Region worst = heap.top();
    heap.pop();
    total_value -= worst.value;
    total_error -= worst.error;
    total_magnitude -= worst.magnitude;
    const double mx = 0.5 * (worst.tx0 + worst.tx1);
    const double my = 0.5 * (worst.ty0 + worst.ty1);
    const std::array<Region, 4> kids = {
        evaluate_region(f, worst.tx0, mx, worst.ty0, my),
        evaluate_region(f, mx, worst.tx1, worst.ty0, my),
        evaluate_region(f, worst.tx0, mx, my, worst.ty1),
        evaluate_region(f, mx, worst.tx1, my, worst.ty1)};
    evals += 4 * 15 * 15;
    for (const Region& r : kids) {
      total_value += r.value;
      total_error += r.error;
      total_magnitude += r.magnitude;
      heap.push(r);
    }
  }
  return QuadResult{total_value, total_error, evals};
}

}  // namespace oamnfc
