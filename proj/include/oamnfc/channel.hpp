// SPDX-License-Identifier: MIT
/// @file channel.hpp
/// @brief Complex channel-matrix assembly from the coupling matrices, the
///        row-averaging reduction and its circulant-structure diagnostic, and
///        import/export of S-parameter documents as channels.
#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "oamnfc/geometry.hpp"
#include "oamnfc/inductance.hpp"

namespace oamnfc {

/// Origin of a channel matrix: computed from geometry or read from a file.
enum class ChannelSource { analytic, imported };

/// Voltage-gain channel matrix between transmit and receive coils.
struct ChannelMatrix {
  Eigen::MatrixXcd h;  ///< N_r x N_t complex gains
  ChannelSource source = ChannelSource::analytic;
  double frequency = 0.0;  ///< Hz
  std::optional<LinkGeometry> geometry;  ///< pose the matrix was computed from, when known
};

/// Row-averaged square channel: every group of I consecutive receive rows is
/// collapsed to its mean, where I = N_r / N_t.
struct ReducedChannel {
  Eigen::MatrixXcd h_hat;  ///< N_t x N_t
  int fold = 1;            ///< I
};

/// H = (-j*omega/Z) * M - (omega^2/Z^2) * M * M_t. The second (transmit
/// crosstalk) term can be dropped to model ideally decoupled transmit coils.
ChannelMatrix assemble_channel(const MutualInductanceMatrix& mi,
                               const CoilElectrical& elec,
                               bool include_crosstalk = true);

/// Collapses each block of I = N_r/N_t consecutive rows to its mean.
/// Throws std::invalid_argument when N_r is not a multiple of N_t.
ReducedChannel reduce_channel(const ChannelMatrix& ch);

/// Departure of h_hat from circulant structure:
/// max |h[i,j] - h[i+1,j+1 (cyclic)]| / max |h|. Zero iff exactly circulant.
double circulant_residual(const ReducedChannel& rc);

/// One-frequency scattering matrix over n_tx + n_rx ports.
struct SParameterDocument {
  double f_hz = 0.0;
  int n_tx = 0;
  int n_rx = 0;
  Eigen::MatrixXcd s;  ///< (n_tx+n_rx) x (n_tx+n_rx)
};

/// Parses the CSV dialect:
///   # sparam v1, f_hz=<f>, n_tx=<nt>, n_rx=<nr>
///   <row>,<col>,<re>,<im>          (1-based indices, every entry exactly once)
/// Throws std::runtime_error with the offending line or the first missing
/// (row, col) on malformed input.
SParameterDocument read_s_parameters(std::istream& in,
                                     const std::string& origin = "<stream>");
SParameterDocument read_s_parameters_file(const std::string& path);

/// Writes the same dialect with 17 significant digits (lossless for double).
void write_s_parameters(const SParameterDocument& doc, std::ostream& out);
void write_s_parameters_file(const SParameterDocument& doc,
                             const std::string& path);

/// Extracts the transmit-to-receive quarter (rows n_tx+1 .. n_tx+n_rx,
/// columns 1 .. n_tx, 1-based) as the channel matrix.
ChannelMatrix import_s_parameters(const SParameterDocument& doc);

}  // namespace oamnfc
