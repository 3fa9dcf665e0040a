// SPDX-License-Identifier: MIT
#include "oamnfc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "detail/quadrature.hpp"
#include "oamnfc/version.hpp"

namespace oamnfc {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double log2_1p(double x) { return std::log1p(x) / std::log(2.0); }

void require_aligned(const LinkGeometry& g, const char* who) {
  if (g.offset_x != 0.0 || g.offset_y != 0.0 || g.tilt_x != 0.0 ||
      g.tilt_y != 0.0)
    throw std::invalid_argument(std::string(who) +
                                ": requires aligned geometry (no offset or "
                                "tilt)");
}

void check_correlation(const Eigen::MatrixXd& g, const char* side) {
  if (g.rows() != g.cols())
    throw std::invalid_argument(std::string("capacity_mimo: ") + side +
                                " correlation must be square");
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    if (std::abs(g(i, i) - 1.0) > 1e-9)
      throw std::invalid_argument(std::string("capacity_mimo: ") + side +
                                  " correlation must have unit diagonal");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  const double min_eig = es.eigenvalues().minCoeff();
  const double max_eig = es.eigenvalues().maxCoeff();
  if (min_eig < -1e-9 * std::max(1.0, max_eig))
    throw std::invalid_argument(std::string("capacity_mimo: ") + side +
                                " correlation is not positive semidefinite");
}

/// The aligned transmit/receive coupling kernel integral J(d): the 1-D
/// closed-form integral at zero tilt for centre distance d and height z.
double aligned_kernel_integral(double d, double z, double r_t, double r_r) {
  const double d_ratio = d / r_r;
  auto kernel = [&](double phi) {
    const double cp = std::cos(phi);
    const double v2 = 1.0 + d_ratio * d_ratio - 2.0 * d_ratio * cp;
    const double v = std::sqrt(std::max(v2, 1e-300));
    const double denom = (r_t + r_r * v) * (r_t + r_r * v) + z * z;
    const double k = 2.0 * std::sqrt(r_t * r_r * v / denom);
    return (1.0 - d_ratio * cp) *
           psi(k, EllipticConvention::half_pi) / (k * v * std::sqrt(v));
  };
  return detail::adaptive_quad_1d(kernel, 0.0, kPi, 1e-11, 1e-300, 4'000'000);
}

CapacityReport report_from_sinr(Eigen::VectorXd sinr, CapacityScheme scheme) {
  CapacityReport rep;
  rep.total_bits = 0.0;
  for (Eigen::Index l = 0; l < sinr.size(); ++l)
    rep.total_bits += log2_1p(sinr(l));
  rep.per_mode_sinr = std::move(sinr);
  rep.scheme = scheme;
  return rep;
}

Eigen::VectorXd oam_sinr(const ChannelMatrix& ch, const LinkBudget& budget) {
  validate_budget(budget);
  const OamSpectrum spec = oam_spectrum(reduce_channel(ch));
  const int n_t = static_cast<int>(spec.diagonal.size());
  const int fold = static_cast<int>(ch.h.rows()) / n_t;
  Eigen::VectorXd sinr = Eigen::VectorXd::Zero(n_t);
  if (budget.total_tx_power == 0.0) return sinr;
  const double noise_term =
      budget.noise_power * n_t / (budget.total_tx_power * fold);
  for (int l = 0; l < n_t; ++l)
    sinr(l) = std::norm(spec.diagonal(l)) /
              (noise_term + spec.offdiag_power_per_mode(l));
  return sinr;
}

Eigen::VectorXd ls_sinr(const ChannelMatrix& ch, const Eigen::MatrixXcd& h_est,
                        const LinkBudget& budget) {
  validate_budget(budget);
  if (h_est.rows() != ch.h.rows() || h_est.cols() != ch.h.cols())
    throw std::invalid_argument(
        "capacity_ls: estimate and channel dimensions differ");
  const int n_t = static_cast<int>(ch.h.cols());
  const PseudoInverse pi = pseudo_inverse(h_est);
  if (pi.rank == 0)
    throw std::invalid_argument("capacity_ls: channel estimate has rank 0");
  const Eigen::MatrixXcd w = make_dft(n_t).matrix;
  const Eigen::MatrixXcd combiner = w.adjoint() * pi.pinv;   // N_t x N_r
  const Eigen::MatrixXcd t = combiner * ch.h * w;            // N_t x N_t
  const Eigen::MatrixXcd d = combiner * combiner.adjoint();  // N_t x N_t

  Eigen::VectorXd sinr = Eigen::VectorXd::Zero(n_t);
  if (budget.total_tx_power == 0.0) return sinr;
  const double mode_power = budget.total_tx_power / n_t;
  for (int l = 0; l < n_t; ++l) {
    double interference = 0.0;
    for (int q = 0; q < n_t; ++q)
      if (q != l) interference += std::norm(t(l, q));
    const double denom = mode_power * interference +
                         budget.noise_power * d(l, l).real();
    sinr(l) = denom > 0.0 ? mode_power * std::norm(t(l, l)) / denom
                          : std::numeric_limits<double>::infinity();
  }
  return sinr;
}

double ber_from_sinr(const Eigen::VectorXd& sinr) {
  double total = 0.0;
  for (Eigen::Index l = 0; l < sinr.size(); ++l)
    total += std::erfc(std::sqrt(sinr(l)));
  return total / (2.0 * sinr.size());
}

}  // namespace

OamSpectrum oam_spectrum(const ReducedChannel& rc) {
  const int n_t = static_cast<int>(rc.h_hat.rows());
  OamSpectrum spec;
  const Eigen::MatrixXcd w = make_dft(n_t).matrix;
  spec.matrix = w.adjoint() * rc.h_hat * w;
  spec.diagonal = spec.matrix.diagonal();
  spec.offdiag_power_per_mode.resize(n_t);
  for (int l = 0; l < n_t; ++l) {
    double power = 0.0;
    for (int q = 0; q < n_t; ++q)
      if (q != l) power += std::norm(spec.matrix(q, l));
    spec.offdiag_power_per_mode(l) = power;
  }
  return spec;
}

CapacityReport capacity_oam(const ChannelMatrix& ch,
                            const LinkBudget& budget) {
  return report_from_sinr(oam_sinr(ch, budget), CapacityScheme::oam_blind);
}

double ber_oam_analytic(const ChannelMatrix& ch, const LinkBudget& budget) {
  return ber_from_sinr(oam_sinr(ch, budget));
}

CapacityReport capacity_oam_simplified(const LinkGeometry& g,
                                       const CoilElectrical& elec,
                                       const LinkBudget& budget) {
  require_aligned(g, "capacity_oam_simplified");
  g.validate();
  validate_budget(budget);
  if (g.n_rx % g.n_tx != 0)
    throw std::invalid_argument(
        "capacity_oam_simplified: receive count must be a multiple of the "
        "transmit count");
  const int n_t = g.n_tx;
  const int fold = g.n_rx / g.n_tx;

  // Closed-form couplings of one transmit coil to the whole receive ring.
  Eigen::VectorXd column(g.n_rx);
  for (int m = 0; m < g.n_rx; ++m) {
    const double angle = 2.0 * kPi * m / g.n_rx;
    const double d =
        std::sqrt(std::max(0.0, g.ring_radius_rx * g.ring_radius_rx +
                                    g.ring_radius_tx * g.ring_radius_tx -
                                    2.0 * g.ring_radius_rx *
                                        g.ring_radius_tx * std::cos(angle)));
    PairGeometry p;
    p.lateral_distance = d;
    p.axial_offset = g.axial_distance;
    p.tilt = 0.0;
    column(m) = mutual_pair_scalar(p, g.coil_radius_tx, g.coil_radius_rx,
                                   g.turns_tx, g.turns_rx);
  }

  // Group-average the column, then diagonalize the resulting circulant
  // structure with an explicit conjugate-phase sum.
  Eigen::VectorXd folded(n_t);
  for (int grp = 0; grp < n_t; ++grp)
    folded(grp) = column.segment(grp * fold, fold).mean();

  const std::complex<double> gain_scale =
      std::complex<double>(0.0, -elec.omega) / elec.impedance;
  Eigen::VectorXd sinr = Eigen::VectorXd::Zero(n_t);
  if (budget.total_tx_power > 0.0) {
    const double snr_scale = budget.total_tx_power * fold /
                             (n_t * budget.noise_power);
    for (int l = 0; l < n_t; ++l) {
      std::complex<double> lambda(0.0, 0.0);
      for (int grp = 0; grp < n_t; ++grp)
        lambda += folded(grp) *
                  std::polar(1.0, -2.0 * kPi * static_cast<double>(l) * grp /
                                      n_t);
      sinr(l) = snr_scale * std::norm(gain_scale * lambda);
    }
  }
  return report_from_sinr(std::move(sinr), CapacityScheme::oam_blind);
}

std::pair<double, double> capacity_bounds(const LinkGeometry& g,
                                          const CoilElectrical& elec,
                                          const LinkBudget& budget) {
  require_aligned(g, "capacity_bounds");
  g.validate();
  validate_budget(budget);
  if (g.n_rx % g.n_tx != 0)
    throw std::invalid_argument(
        "capacity_bounds: receive count must be a multiple of the transmit "
        "count");
  const double fold = static_cast<double>(g.n_rx) / g.n_tx;
  const double kk = static_cast<double>(g.turns_tx) * g.turns_rx;
  const double gamma = 4.0 * kMu0 * kMu0 * elec.omega * elec.omega * kk * kk *
                       g.coil_radius_tx * g.coil_radius_rx /
                       (kPi * kPi * std::norm(elec.impedance));
  const double snr_scale =
      budget.total_tx_power * fold * fold / budget.noise_power;

  auto one_bound = [&](double d) {
    const double j = aligned_kernel_integral(d, g.axial_distance,
                                             g.coil_radius_tx,
                                             g.coil_radius_rx);
    return g.n_tx * log2_1p(snr_scale * gamma * j * j);
  };
  const double upper = one_bound(std::abs(g.ring_radius_rx - g.ring_radius_tx));
  const double lower = one_bound(g.ring_radius_rx + g.ring_radius_tx);
  return {lower, upper};
}

CapacityReport capacity_ls(const ChannelMatrix& ch,
                           const Eigen::MatrixXcd& h_est,
                           const LinkBudget& budget) {
  return report_from_sinr(ls_sinr(ch, h_est, budget), CapacityScheme::oam_ls);
}

double ber_ls(const ChannelMatrix& ch, const Eigen::MatrixXcd& h_est,
              const LinkBudget& budget) {
  return ber_from_sinr(ls_sinr(ch, h_est, budget));
}

double capacity_siso(const LinkGeometry& g, const CoilElectrical& elec,
                     const LinkBudget& budget) {
  validate_budget(budget);
  if (budget.total_tx_power == 0.0) return 0.0;
  const double m = mutual_tx_rx(g, 0, 0, MutualMethod::elliptic);
  const double snr = budget.total_tx_power / budget.noise_power *
                     elec.omega * elec.omega * m * m /
                     std::norm(elec.impedance);
  return log2_1p(snr);
}

Eigen::MatrixXd default_correlation_tx(const LinkGeometry& g) {
  g.validate();
  Eigen::MatrixXd corr =
      Eigen::MatrixXd::Identity(g.n_tx, g.n_tx);
  if (g.n_tx == 1) return corr;
  const double self = loop_self_inductance(g.coil_radius_tx, g.turns_tx);
  for (int gap = 1; gap < g.n_tx; ++gap) {
    const double value =
        coplanar_mutual(tx_pair_distance(g, gap, 0), g.coil_radius_tx,
                        g.turns_tx) /
        self;
    for (int n = 0; n < g.n_tx; ++n) corr(n, (n + gap) % g.n_tx) += value;
  }
  return corr;
}

Eigen::MatrixXd default_correlation_rx(const LinkGeometry& g) {
  // The receive ring has the same uniform-circle layout; reuse the transmit
  // construction on a mirrored geometry.
  LinkGeometry mirrored = g;
  mirrored.n_tx = g.n_rx;
  mirrored.ring_radius_tx = g.ring_radius_rx;
  mirrored.coil_radius_tx = g.coil_radius_rx;
  mirrored.turns_tx = g.turns_rx;
  return default_correlation_tx(mirrored);
}

double capacity_mimo(const ChannelMatrix& ch, const LinkBudget& budget,
                     const Eigen::MatrixXd& corr_tx,
                     const Eigen::MatrixXd& corr_rx, bool waterfill) {
  validate_budget(budget);
  check_correlation(corr_tx, "transmit");
  check_correlation(corr_rx, "receive");
  if (corr_tx.rows() != ch.h.cols() || corr_rx.rows() != ch.h.rows())
    throw std::invalid_argument(
        "capacity_mimo: correlation sizes must match the channel");
  if (budget.total_tx_power == 0.0) return 0.0;

  const Eigen::MatrixXcd h_mimo = corr_rx * ch.h * corr_tx;
  const int n_t = static_cast<int>(ch.h.cols());

  if (!waterfill) {
    const Eigen::MatrixXcd gram =
        Eigen::MatrixXcd::Identity(h_mimo.rows(), h_mimo.rows()) +
        (budget.total_tx_power / (budget.noise_power * n_t)) *
            (h_mimo * h_mimo.adjoint());
    // log2 det of a Hermitian positive-definite matrix via its eigenvalues.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
    double bits = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      bits += std::log2(std::max(es.eigenvalues()(i), 1.0));
    return bits;
  }

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h_mimo);
  std::vector<double> inv_gain;  // noise_power / sigma^2 per usable stream
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    const double s2 = svd.singularValues()(i) * svd.singularValues()(i);
    if (s2 > 0.0) inv_gain.push_back(budget.noise_power / s2);
  }
  std::sort(inv_gain.begin(), inv_gain.end());
  // Highest water level using k best streams: mu = (P + sum inv_gain_k)/k;
  // find the largest k with mu > inv_gain[k-1].
  std::size_t k = inv_gain.size();
  double mu = 0.0;
  while (k > 0) {
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += inv_gain[i];
    mu = (budget.total_tx_power + sum) / static_cast<double>(k);
    if (mu > inv_gain[k - 1]) break;
    --k;
  }
  double bits = 0.0;
  for (std::size_t i = 0; i < k; ++i) bits += std::log2(mu / inv_gain[i]);
  return bits;
}

SweepResult capacity_gap_surface(const SimulationConfig& base, int n_max) {
  if (n_max < 1)
    throw std::invalid_argument("capacity_gap_surface: n_max must be >= 1");
  SweepResult result;
  result.axis_names = {"n_tx", "n_rx"};
  result.value_names = {"capacity_ls", "capacity_mimo", "capacity_gap"};
  result.spec.base = base;
  result.spec.label = "capacity_gap_surface";
  result.spec.seed = base.seed;
  result.spec.trials = base.trials;
  result.version = kVersion;
  result.config_digest = config_digest(base);

  const CoilElectrical elec = make_electrical(base);
  for (int n_tx = 1; n_tx <= n_max; ++n_tx)
    for (int n_rx = 1; n_rx <= n_max; ++n_rx) {
      SweepPoint point;
      point.coords = {static_cast<double>(n_tx), static_cast<double>(n_rx)};
      point.values.assign(3, std::numeric_limits<double>::quiet_NaN());
      LinkGeometry g = base.geometry;
      g.n_tx = n_tx;
      g.n_rx = n_rx;
      try {
        g.validate();
        const MutualInductanceMatrix mi = build_inductance_matrices(g);
        const ChannelMatrix ch =
            assemble_channel(mi, elec, base.flags.crosstalk);
        const double c_ls = capacity_ls(ch, ch.h, base.budget).total_bits;
        const double c_mimo =
            capacity_mimo(ch, base.budget, default_correlation_tx(g),
                          default_correlation_rx(g), base.flags.waterfill);
        point.values = {c_ls, c_mimo, c_ls - c_mimo};
      } catch (const std::exception& ex) {
        point.skip_reason = ex.what();
      }
      result.points.push_back(std::move(point));
    }
  return result;
}

}  // namespace oamnfc
