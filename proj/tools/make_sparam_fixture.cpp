// SPDX-License-Identifier: MIT
/// @file make_sparam_fixture.cpp
/// @brief Writes a synthetic S-parameter CSV document whose transmit-to-
///        receive quarter equals the analytic baseline channel matrix, so
///        that importing the file must reproduce the directly computed
///        metrics. The other quarters are filled with deterministic
///        pseudo-random values that the importer must ignore.
#include <cstdio>
#include <iostream>

#include "oamnfc/channel.hpp"
#include "oamnfc/config.hpp"
#include "oamnfc/txrx.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_sparam_fixture <output.csv>\n";
    return 2;
  }
  using namespace oamnfc;
  try {
    const SimulationConfig cfg = default_config();
    const ChannelMatrix ch =
        assemble_channel(build_inductance_matrices(cfg.geometry),
                         make_electrical(cfg), cfg.flags.crosstalk);
    const int n_tx = cfg.geometry.n_tx;
    const int n_rx = cfg.geometry.n_rx;

    SParameterDocument doc;
    doc.f_hz = cfg.electrical.frequency;
    doc.n_tx = n_tx;
    doc.n_rx = n_rx;
    doc.s.resize(n_tx + n_rx, n_tx + n_rx);
    Rng rng(20240817u);
    for (Eigen::Index r = 0; r < doc.s.rows(); ++r)
      for (Eigen::Index c = 0; c < doc.s.cols(); ++c)
        doc.s(r, c) = 0.01 * complex_gaussian(rng, 1.0);
    doc.s.block(n_tx, 0, n_rx, n_tx) = ch.h;

    write_s_parameters_file(doc, argv[1]);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 3;
  }
  return 0;
}
