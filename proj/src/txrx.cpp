// SPDX-License-Identifier: MIT
#include "oamnfc/txrx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace oamnfc {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kWilsonZ = 1.959963984540054;  // 95% two-sided

long long gcd_ll(long long a, long long b) {
  while (b != 0) {
    const long long t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

Eigen::VectorXcd fold_vector(const Eigen::VectorXcd& v, int fold) {
  const Eigen::Index n_out = v.size() / fold;
  Eigen::VectorXcd out(n_out);
  for (Eigen::Index g = 0; g < n_out; ++g)
    out(g) = v.segment(g * fold, fold).mean();
  return out;
}

double sign_or_zero(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::complex<double> complex_gaussian(Rng& rng, double power) {
  if (power < 0.0)
    throw std::invalid_argument("complex_gaussian: negative power");
  if (power == 0.0) return {0.0, 0.0};
  std::normal_distribution<double> g(0.0, std::sqrt(0.5 * power));
  const double re = g(rng);
  const double im = g(rng);
  return {re, im};
}

DftOperator make_dft(int n) {
  if (n < 1) throw std::invalid_argument("make_dft: order must be >= 1");
  DftOperator op;
  op.order = n;
  op.matrix.resize(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double phase = 2.0 * kPi * static_cast<double>(a) * b / n;
      op.matrix(a, b) = std::polar(scale, phase);
    }
  return op;
}

void validate_budget(const LinkBudget& b) {
  if (!(b.total_tx_power >= 0.0))
    throw std::invalid_argument("budget: total_tx_power must be >= 0");
  if (!(b.noise_power > 0.0))
    throw std::invalid_argument("budget: noise_power must be > 0");
}

Eigen::VectorXcd oam_excite(const Eigen::VectorXcd& x, const DftOperator& w) {
  if (x.size() != w.order)
    throw std::invalid_argument("oam_excite: symbol vector length mismatch");
  return w.matrix * x;
}

Eigen::VectorXcd propagate(const ChannelMatrix& ch,
                           const Eigen::VectorXcd& v_t, double n0, Rng& rng) {
  if (v_t.size() != ch.h.cols())
    throw std::invalid_argument("propagate: excitation length mismatch");
  if (n0 < 0.0) throw std::invalid_argument("propagate: negative noise power");
  Eigen::VectorXcd v = ch.h * v_t;
  if (n0 > 0.0)
    for (Eigen::Index i = 0; i < v.size(); ++i)
      v(i) += complex_gaussian(rng, n0);
  return v;
}

BlindDetector make_blind_detector(const ChannelMatrix& nominal) {
  const ReducedChannel rc = reduce_channel(nominal);
  const int n_t = static_cast<int>(rc.h_hat.rows());
  BlindDetector det;
  det.w = make_dft(n_t).matrix;
  det.mode_gains =
      (det.w.adjoint() * rc.h_hat * det.w).diagonal();
  det.fold = rc.fold;
  det.n_t = n_t;
  const double top = det.mode_gains.cwiseAbs().maxCoeff();
  det.detectable.resize(n_t);
  for (int l = 0; l < n_t; ++l)
    det.detectable[l] = std::abs(det.mode_gains(l)) > 1e-12 * top && top > 0.0;
  return det;
}

Detection detect_blind(const BlindDetector& det, const Eigen::VectorXcd& v_r) {
  if (v_r.size() != static_cast<Eigen::Index>(det.n_t) * det.fold)
    throw std::invalid_argument("detect_blind: received vector length mismatch");
  const Eigen::VectorXcd reduced = fold_vector(v_r, det.fold);
  const Eigen::VectorXcd y = det.w.adjoint() * reduced;
  Detection r;
  r.soft.resize(det.n_t);
  r.hard.resize(det.n_t);
  for (int l = 0; l < det.n_t; ++l) {
    if (det.detectable[l]) {
      r.soft(l) = y(l) / det.mode_gains(l);
      r.hard(l) = sign_or_zero(r.soft(l).real());
    } else {
      r.soft(l) = 0.0;
      r.hard(l) = 0.0;
    }
  }
  return r;
}

Detection detect_blind(const ChannelMatrix& nominal,
                       const Eigen::VectorXcd& v_r) {
  return detect_blind(make_blind_detector(nominal), v_r);
}

void validate_pilot(const PilotConfig& cfg, int n_t, int n_r) {
  if (cfg.length <= std::max(n_t, n_r))
    throw std::invalid_argument(
        "pilot: length must exceed both coil counts");
  if (cfg.root < 1)
    throw std::invalid_argument("pilot: root must be a positive integer");
  if (gcd_ll(cfg.root, cfg.length) != 1)
    throw std::invalid_argument("pilot: root must be coprime with the length");
  if (!(cfg.pilot_snr > 0.0))
    throw std::invalid_argument("pilot: pilot_snr must be > 0");
}

Eigen::MatrixXcd zc_pilot(const PilotConfig& cfg, int n_t) {
  if (n_t < 1) throw std::invalid_argument("zc_pilot: n_t must be >= 1");
  if (cfg.length <= n_t)
    throw std::invalid_argument("zc_pilot: length must exceed n_t");
  if (cfg.root < 1 || gcd_ll(cfg.root, cfg.length) != 1)
    throw std::invalid_argument("zc_pilot: root must be coprime with length");
  const long long t_len = cfg.length;
  const long long p = cfg.root;
  const bool even = (t_len % 2 == 0);
  Eigen::MatrixXcd s(n_t, cfg.length);
  for (long long n = 0; n < n_t; ++n)
    for (long long t = 0; t < t_len; ++t) {
      const long long m = t - n;
      const long long q = even ? m * m : m * (m + 1);
      const double phase = -kPi * static_cast<double>(p) *
                           static_cast<double>(q) / static_cast<double>(t_len);
      s(n, t) = std::polar(1.0, phase);
    }
  return s;
}

Eigen::MatrixXcd estimate_channel_ls(const ChannelMatrix& ch,
                                     const PilotConfig& cfg, Rng& rng) {
  const int n_t = static_cast<int>(ch.h.cols());
  const int n_r = static_cast<int>(ch.h.rows());
  if (std::isinf(cfg.pilot_snr)) return ch.h;  // exact-knowledge shortcut
  validate_pilot(cfg, n_t, n_r);
  const Eigen::MatrixXcd s = zc_pilot(cfg, n_t);
  const double root_p = std::sqrt(cfg.pilot_snr);
  Eigen::MatrixXcd received = root_p * (ch.h * s);
  for (Eigen::Index r = 0; r < received.rows(); ++r)
    for (Eigen::Index c = 0; c < received.cols(); ++c)
      received(r, c) += complex_gaussian(rng, 1.0);
  return received * s.adjoint() / (root_p * cfg.length);
}

PseudoInverse pseudo_inverse(const Eigen::MatrixXcd& a, double rel_cutoff) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
      a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double top = sv.size() > 0 ? sv(0) : 0.0;
  PseudoInverse out;
  if (!(top > 0.0)) {
    out.pinv = Eigen::MatrixXcd::Zero(a.cols(), a.rows());
    out.condition_number = std::numeric_limits<double>::infinity();
    out.rank = 0;
    return out;
  }
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  double smallest_kept = top;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_cutoff * top) {
      inv(i) = 1.0 / sv(i);
      smallest_kept = sv(i);
      ++rank;
    }
  out.pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
  out.condition_number = top / smallest_kept;
  out.rank = rank;
  return out;
}

LsDetector make_ls_detector(const Eigen::MatrixXcd& h_est) {
  const int n_t = static_cast<int>(h_est.cols());
  const PseudoInverse pi = pseudo_inverse(h_est);
  if (pi.rank < n_t) {
    std::ostringstream msg;
    msg << "ls detector: rank-deficient channel estimate (rank " << pi.rank
        << " < " << n_t << " modes)";
    throw std::runtime_error(msg.str());
  }
  LsDetector det;
  det.combiner = make_dft(n_t).matrix.adjoint() * pi.pinv;
  det.condition_number = pi.condition_number;
  det.rank = pi.rank;
  return det;
}

Detection detect_ls(const LsDetector& det, const Eigen::VectorXcd& v_r) {
  if (v_r.size() != det.combiner.cols())
    throw std::invalid_argument("detect_ls: received vector length mismatch");
  Detection r;
  r.soft = det.combiner * v_r;
  r.hard.resize(r.soft.size());
  for (Eigen::Index l = 0; l < r.soft.size(); ++l)
    r.hard(l) = sign_or_zero(r.soft(l).real());
  return r;
}

Detection detect_ls(const Eigen::MatrixXcd& h_est,
                    const Eigen::VectorXcd& v_r) {
  return detect_ls(make_ls_detector(h_est), v_r);
}

double mse_ls(const ChannelMatrix& ch, const PilotConfig& cfg,
              const LinkBudget& budget, Rng& rng, long trials) {
  if (trials < 1) throw std::invalid_argument("mse_ls: trials must be >= 1");
  const int n_t = static_cast<int>(ch.h.cols());
  const DftOperator w = make_dft(n_t);
  const double amp = std::sqrt(budget.total_tx_power / n_t);
  std::uniform_int_distribution<int> bit(0, 1);
  double total = 0.0;
  for (long trial = 0; trial < trials; ++trial) {
    const Eigen::MatrixXcd h_est = estimate_channel_ls(ch, cfg, rng);
    const LsDetector det = make_ls_detector(h_est);
    Eigen::VectorXcd x(n_t);
    for (int l = 0; l < n_t; ++l) x(l) = bit(rng) ? amp : -amp;
    const Eigen::VectorXcd v_r =
        propagate(ch, oam_excite(x, w), budget.noise_power, rng);
    const Detection d = detect_ls(det, v_r);
    total += (d.soft - x).squaredNorm() / n_t;
  }
  return total / trials;
}

double mse_ls_limit(const ChannelMatrix& ch, const LinkBudget& budget) {
  const PseudoInverse pi = pseudo_inverse(ch.h);
  const int n_t = static_cast<int>(ch.h.cols());
  return budget.noise_power * pi.pinv.squaredNorm() / n_t;
}

std::vector<BerPoint> run_ber(const ChannelMatrix& ch, const LinkBudget& budget,
                              DetectorKind kind, long long trials,
                              std::uint64_t seed, const ChannelMatrix* nominal,
                              const PilotConfig* pilot) {
  if (trials < 1) throw std::invalid_argument("run_ber: trials must be >= 1");
  std::vector<double> grid = budget.snr_grid_db;
  if (grid.empty())
    grid.push_back(10.0 *
                   std::log10(budget.total_tx_power / budget.noise_power));

  const int n_t = static_cast<int>(ch.h.cols());
  const DftOperator w = make_dft(n_t);
  const PilotConfig pilot_cfg = pilot ? *pilot : PilotConfig{};

  std::vector<BerPoint> out;
  out.reserve(grid.size());
  for (std::size_t point = 0; point < grid.size(); ++point) {
    const double snr_db = grid[point];
    const double n0 =
        budget.total_tx_power * std::pow(10.0, -snr_db / 10.0);
    Rng rng(derive_seed(seed, point));

    BlindDetector blind;
    LsDetector ls;
    if (kind == DetectorKind::blind) {
      blind = make_blind_detector(nominal ? *nominal : ch);
    } else {
      ls = make_ls_detector(estimate_channel_ls(ch, pilot_cfg, rng));
    }

    const double amp = std::sqrt(budget.total_tx_power / n_t);
    std::uniform_int_distribution<int> bit(0, 1);
    long long errors = 0;
    for (long long trial = 0; trial < trials; ++trial) {
      Eigen::VectorXcd x(n_t);
      for (int l = 0; l < n_t; ++l) x(l) = bit(rng) ? amp : -amp;
      const Eigen::VectorXcd v_r = propagate(ch, oam_excite(x, w), n0, rng);
      const Detection d = kind == DetectorKind::blind ? detect_blind(blind, v_r)
                                                      : detect_ls(ls, v_r);
      for (int l = 0; l < n_t; ++l)
        if (d.hard(l) != (x(l).real() > 0.0 ? 1.0 : -1.0)) ++errors;
    }

    BerPoint bp;
    bp.snr_db = snr_db;
    bp.errors = errors;
    bp.bits = trials * n_t;
    bp.ber = static_cast<double>(errors) / static_cast<double>(bp.bits);
    const double n = static_cast<double>(bp.bits);
    const double z2 = kWilsonZ * kWilsonZ;
    const double denom = 1.0 + z2 / n;
    const double center = (bp.ber + z2 / (2.0 * n)) / denom;
    const double half =
        kWilsonZ *
        std::sqrt(bp.ber * (1.0 - bp.ber) / n + z2 / (4.0 * n * n)) / denom;
    bp.wilson_lo = std::max(0.0, center - half);
    bp.wilson_hi = std::min(1.0, center + half);
    out.push_back(bp);
  }
  return out;
}

}  // namespace oamnfc
