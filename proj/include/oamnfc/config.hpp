// SPDX-License-Identifier: MIT
/// @file config.hpp
/// @brief Simulation configuration: the aggregate parameter set, a strict
///        sectioned key/value file format (unknown keys rejected with line
///        numbers), and unit conversion at the boundary (mm, degrees, MHz,
///        dB outside; SI and linear units inside).
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oamnfc/geometry.hpp"
#include "oamnfc/inductance.hpp"
#include "oamnfc/txrx.hpp"

namespace oamnfc {

/// Raised for any configuration-file or schema problem; messages carry
/// file:line anchors where applicable.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Electrical parameters as configured; closed-form derivation unless an
/// explicit lumped override is given.
struct ElectricalConfig {
  double frequency = 13.56e6;        ///< operating f, Hz
  double resonance = 13.35e6;        ///< series-resonance frequency, Hz
  double resistivity = 1.75e-8;      ///< ohm*m
  double wire_cross_section = 5e-8;  ///< m^2
  bool has_lcr_override = false;     ///< true when L/C/R given explicitly
  double inductance = 0.0;           ///< H (override)
  double capacitance = 0.0;          ///< F (override)
  double resistance = 0.0;           ///< ohm (override)
};

/// Behaviour switches.
struct FlagsConfig {
  bool crosstalk = true;  ///< keep the transmit-coupling term of the channel
  EllipticConvention convention = EllipticConvention::full_pi;
  DetectorKind detector = DetectorKind::blind;
  bool waterfill = false;  ///< water-filling power allocation for MIMO
};

/// Raw parsed sweep request (axis names are config field names); the sweep
/// engine resolves it against the rest of the configuration.
struct SweepRequest {
  struct Axis {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;
  };
  std::vector<Axis> axes;
  std::vector<std::string> metrics;
  std::optional<long long> trials;
};

/// Everything a simulation run needs.
struct SimulationConfig {
  LinkGeometry geometry;
  ElectricalConfig electrical;
  LinkBudget budget;
  PilotConfig pilot;
  FlagsConfig flags;
  std::uint64_t seed = 1;
  long long trials = 10000;
  std::optional<SweepRequest> sweep;  ///< present when the file has [sweep]
};

/// Reference parameter set used as the parsing and recipe baseline:
/// 8x8 coils, 25 mm rings, 5 mm single-turn coils, 25 mm separation,
/// 13.56 MHz operation with 13.35 MHz resonance, 8 W transmit power and
/// 0.08 W per-coil noise.
SimulationConfig default_config();

/// Parses the sectioned key/value text. `origin` names the source in error
/// messages. Unknown sections/keys, duplicate keys, malformed values, and
/// out-of-range settings raise ConfigError with line numbers.
SimulationConfig parse_config(const std::string& text,
                              const std::string& origin = "<config>");

/// Loads and parses a file; schema-validates before returning.
SimulationConfig load_config(const std::string& path);

/// Canonical single-line rendering of every resolved field; stable across
/// runs, used for digests and snapshots.
std::string canonical_config_string(const SimulationConfig& cfg);

/// FNV-1a 64-bit digest of the canonical rendering, as fixed-width hex.
std::string config_digest(const SimulationConfig& cfg);

/// Electrical model for the configuration (explicit override or closed-form
/// derivation from the transmit coil).
CoilElectrical make_electrical(const SimulationConfig& cfg);

}  // namespace oamnfc
