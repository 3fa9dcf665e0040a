// SPDX-License-Identifier: MIT
/// @file txrx.hpp
/// @brief Communication layer: mode excitation through the unitary IDFT,
///        noisy propagation, blind per-mode detection on reduced channels,
///        orthogonal-pilot least-squares channel estimation and detection,
///        detection MSE, and Monte Carlo bit-error-rate runs (BPSK).
#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "oamnfc/channel.hpp"

namespace oamnfc {

/// Deterministic random stream; every Monte Carlo entry point takes one.
using Rng = std::mt19937_64;

/// Stateless mix of a master seed with a stream index, so that per-point
/// streams are independent of scheduling order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// One circularly-symmetric complex Gaussian draw with total variance
/// `power` (real and imaginary parts each carry power/2).
std::complex<double> complex_gaussian(Rng& rng, double power);

/// Unitary inverse-DFT mode synthesis operator.
struct DftOperator {
  int order = 0;
  Eigen::MatrixXcd matrix;  ///< W[a,b] = exp(+j 2 pi a b / N) / sqrt(N)
};

DftOperator make_dft(int n);

/// Per-mode orthogonal pilot sequence parameters.
struct PilotConfig {
  int length = 17;        ///< T; must exceed both coil counts
  int root = 1;           ///< p; must be coprime with T
  double pilot_snr = 1e6; ///< P, linear, per transmit coil
};

/// Power and noise bookkeeping for a link evaluation.
struct LinkBudget {
  double total_tx_power = 8.0;   ///< P_t, watts, shared by all modes
  double noise_power = 0.08;     ///< N_0, watts per receive coil
  std::vector<double> snr_grid_db;  ///< evaluation grid; N_0 derived per point
};

void validate_budget(const LinkBudget& b);

/// v_t = W x; unitary, hence energy preserving.
Eigen::VectorXcd oam_excite(const Eigen::VectorXcd& x, const DftOperator& w);

/// v_r = H v_t + n, with i.i.d. complex Gaussian noise of power n0 per
/// receive coil. n0 = 0 gives the exact noiseless product.
Eigen::VectorXcd propagate(const ChannelMatrix& ch,
                           const Eigen::VectorXcd& v_t, double n0, Rng& rng);

/// Soft and hard (BPSK sign) estimates of one transmitted symbol vector.
struct Detection {
  Eigen::VectorXcd soft;
  Eigen::VectorXd hard;  ///< entries in {-1, +1}; 0 where undetectable
};

/// Per-mode equalizer for reduced channels: averages receive groups, applies
/// the conjugate DFT, and divides by the nominal per-mode gains. The gains
/// come from a channel the receiver assumes (typically the nominal aligned
/// analytic channel), not from estimation.
struct BlindDetector {
  Eigen::MatrixXcd w;           ///< DFT operator of size N_t
  Eigen::VectorXcd mode_gains;  ///< nominal diagonalized gains
  std::vector<bool> detectable; ///< false where a mode gain is numerically 0
  int fold = 1;                 ///< I = N_r / N_t
  int n_t = 0;
};

/// Builds the blind detector from the channel the receiver assumes.
/// Throws when N_r is not a multiple of N_t.
BlindDetector make_blind_detector(const ChannelMatrix& nominal);

Detection detect_blind(const BlindDetector& det, const Eigen::VectorXcd& v_r);

/// Convenience overload: derives the detector from `nominal` on the fly.
Detection detect_blind(const ChannelMatrix& nominal,
                       const Eigen::VectorXcd& v_r);

/// Constant-amplitude pilot matrix, N_t x T: row n is the length-T root
/// sequence cyclically shifted by n. Distinct shifts are exactly orthogonal
/// for prime T (asserted); for other lengths the Gram residual is the
/// caller's to check.
Eigen::MatrixXcd zc_pilot(const PilotConfig& cfg, int n_t);

void validate_pilot(const PilotConfig& cfg, int n_t, int n_r);

/// Least-squares channel estimate from one pilot block:
/// receive = sqrt(P) H S + N (unit-variance noise), estimate = receive S^H /
/// (sqrt(P) T).
Eigen::MatrixXcd estimate_channel_ls(const ChannelMatrix& ch,
                                     const PilotConfig& cfg, Rng& rng);

/// Moore-Penrose pseudo-inverse with relative singular-value cutoff, plus
/// the diagnostics the detection layer reports.
struct PseudoInverse {
  Eigen::MatrixXcd pinv;
  double condition_number = 0.0;  ///< largest/smallest retained singular value
  int rank = 0;
};

PseudoInverse pseudo_inverse(const Eigen::MatrixXcd& a,
                             double rel_cutoff = 1e-12);

/// Linear combiner W^H pinv(H_est) with its conditioning diagnostics.
struct LsDetector {
  Eigen::MatrixXcd combiner;  ///< N_t x N_r
  double condition_number = 0.0;
  int rank = 0;
};

/// Throws std::runtime_error naming the deficient rank when rank(H_est) is
/// below the mode count.
LsDetector make_ls_detector(const Eigen::MatrixXcd& h_est);

Detection detect_ls(const LsDetector& det, const Eigen::VectorXcd& v_r);

/// Convenience overload building the detector each call.
Detection detect_ls(const Eigen::MatrixXcd& h_est,
                    const Eigen::VectorXcd& v_r);

/// Monte Carlo per-symbol detection MSE of the estimation-based receiver:
/// mean over trials of |detected - sent|^2 / N_t, with BPSK symbols at power
/// total_tx_power/N_t per mode and fresh pilot noise per trial.
double mse_ls(const ChannelMatrix& ch, const PilotConfig& cfg,
              const LinkBudget& budget, Rng& rng, long trials);

/// Infinite-pilot-power limit of mse_ls: noise_power * ||pinv(H)||_F^2 / N_t.
double mse_ls_limit(const ChannelMatrix& ch, const LinkBudget& budget);

/// Which receiver structure a BER run exercises.
enum class DetectorKind { blind, ls };

/// Empirical error rate at one SNR point with a 95% Wilson score interval.
struct BerPoint {
  double snr_db = 0.0;
  double ber = 0.0;
  long long errors = 0;
  long long bits = 0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
};

/// Runs `trials` BPSK symbol vectors per SNR grid point (bits = trials * N_t)
/// with per-point noise power total_tx_power / 10^(snr/10). The blind path
/// takes its mode gains from `nominal` when given, else from `ch` itself;
/// the estimation path re-estimates the channel once per SNR point using
/// `pilot` (defaults when null).
std::vector<BerPoint> run_ber(const ChannelMatrix& ch, const LinkBudget& budget,
                              DetectorKind kind, long long trials,
                              std::uint64_t seed,
                              const ChannelMatrix* nominal = nullptr,
                              const PilotConfig* pilot = nullptr);

}  // namespace oamnfc
