// SPDX-License-Identifier: MIT
/// @file metrics.hpp
/// @brief Analytic performance formulas: per-mode capacity and bit error
///        rate of the reduced (blind) path, the estimation-based path, the
///        geometry-only simplified capacity with its closed-form bounds, and
///        single-coil / conventional-MIMO baselines.
#pragma once

#include <optional>
#include <utility>

#include <Eigen/Dense>

#include "oamnfc/channel.hpp"
#include "oamnfc/harness.hpp"
#include "oamnfc/txrx.hpp"

namespace oamnfc {

/// Mode-domain view of a reduced channel: the conjugate-DFT similarity
/// transform, its diagonal (per-mode gains), and per-mode leakage powers.
struct OamSpectrum {
  Eigen::MatrixXcd matrix;    ///< W^H h_hat W
  Eigen::VectorXcd diagonal;  ///< per-mode gains
  Eigen::VectorXd offdiag_power_per_mode;  ///< column leakage, excl. diagonal
};

OamSpectrum oam_spectrum(const ReducedChannel& rc);

/// Which formula produced a capacity figure.
enum class CapacityScheme { oam_blind, oam_ls, siso, mimo, mimo_wf };

/// Per-mode SINRs, their summed log capacity, and optional sandwich bounds.
struct CapacityReport {
  Eigen::VectorXd per_mode_sinr;  ///< linear
  double total_bits = 0.0;        ///< bits/s/Hz
  CapacityScheme scheme = CapacityScheme::oam_blind;
  std::optional<std::pair<double, double>> bounds;  ///< (lower, upper)
};

/// Reduced-path capacity. Per-mode
///   SINR_l = |gain_l|^2 / (N0 N_t / (P_t I) + sum_{q != l} |matrix[q,l]|^2),
/// total = sum log2(1 + SINR_l). Requires N_r to be a multiple of N_t.
CapacityReport capacity_oam(const ChannelMatrix& ch, const LinkBudget& budget);

/// Average BPSK error probability of the reduced path:
/// (1/(2 N_t)) sum erfc(sqrt(SINR_l)), sharing capacity_oam's SINRs.
double ber_oam_analytic(const ChannelMatrix& ch, const LinkBudget& budget);

/// Aligned-geometry capacity straight from the closed-form couplings (no
/// matrix assembly; transmit crosstalk excluded by construction). Throws
/// when the geometry is misaligned.
CapacityReport capacity_oam_simplified(const LinkGeometry& g,
                                       const CoilElectrical& elec,
                                       const LinkBudget& budget);

/// Closed-form sandwich for the simplified capacity: both sides evaluate
///   N_t log2(1 + (P_t I^2 / N0) gamma J(d)^2),
/// with the near kernel distance d = |R_r - R_t| for the upper bound and the
/// far distance d = R_r + R_t for the lower bound.
std::pair<double, double> capacity_bounds(const LinkGeometry& g,
                                          const CoilElectrical& elec,
                                          const LinkBudget& budget);

/// Estimation-path capacity for any shape: with
///   T   = W^H pinv(H_est) H W,
///   D   = W^H pinv(H_est) [W^H pinv(H_est)]^H,
/// SINR_l = (P_t/N_t)|T[l,l]|^2 /
///          ((P_t/N_t) sum_{q != l} |T[l,q]|^2 + N0 D[l,l]).
CapacityReport capacity_ls(const ChannelMatrix& ch,
                           const Eigen::MatrixXcd& h_est,
                           const LinkBudget& budget);

/// BPSK error probability with capacity_ls's SINRs.
double ber_ls(const ChannelMatrix& ch, const Eigen::MatrixXcd& h_est,
              const LinkBudget& budget);

/// Single-coil baseline: log2(1 + (P_t/N0) omega^2 |M_11|^2 / |Z|^2) using
/// the first transmit/receive coil pair of the geometry.
double capacity_siso(const LinkGeometry& g, const CoilElectrical& elec,
                     const LinkBudget& budget);

/// Default physically-derived correlation: identity plus the ring coupling
/// matrix normalized by the loop self-inductance (signed, unit diagonal).
Eigen::MatrixXd default_correlation_tx(const LinkGeometry& g);
Eigen::MatrixXd default_correlation_rx(const LinkGeometry& g);

/// Conventional-MIMO baseline on the correlated channel G_r H G_t:
/// equal power log2 det(I + (P_t/(N0 N_t)) H_mimo H_mimo^H), or water-filled
/// power allocation over its singular values when `waterfill` is set.
/// Correlation inputs must be PSD with unit diagonal.
double capacity_mimo(const ChannelMatrix& ch, const LinkBudget& budget,
                     const Eigen::MatrixXd& corr_tx,
                     const Eigen::MatrixXd& corr_rx, bool waterfill = false);

/// Estimation-path OAM capacity minus correlated-MIMO capacity over the
/// (n_tx, n_rx) grid [1, n_max]^2, using the template's geometry for ring
/// and coil dimensions. Infeasible grid points are recorded with a reason.
SweepResult capacity_gap_surface(const SimulationConfig& base, int n_max);

}  // namespace oamnfc
