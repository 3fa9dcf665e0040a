// SPDX-License-Identifier: MIT
/// @file harness.hpp
/// @brief Deterministic parameter-sweep engine with named experiment recipes
///        and CSV/JSON tabular output.
///
/// A sweep walks a 1- or 2-axis grid over configuration fields, evaluates a
/// set of metrics at each point, and collects one row per point. Per-point
/// random streams are derived from (seed, point index), so results do not
/// depend on worker scheduling; reruns with the same spec and seed produce
/// byte-identical files.
#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "oamnfc/config.hpp"

namespace oamnfc {

/// Metrics a sweep can evaluate at each grid point. `bounds` expands to the
/// two output columns bound_lower / bound_upper.
enum class Metric {
  capacity_oam,
  capacity_ls,
  capacity_siso,
  capacity_mimo,
  ber_analytic,
  ber_mc,
  bounds,
  circulant_residual,
};

std::string metric_name(Metric m);
Metric metric_from_name(const std::string& name);

/// One swept configuration field, sampled at `count` evenly spaced values
/// from lo to hi inclusive. The name must be a sweepable config field.
struct SweepAxis {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  int count = 1;
};

/// Names accepted as sweep axes.
std::vector<std::string> sweepable_axis_names();

/// Applies one axis value to a configuration (unit conversion included;
/// integer fields are rounded). Throws ConfigError for unknown names.
void apply_axis_value(SimulationConfig& cfg, const std::string& axis_name,
                      double value);

/// Complete description of one sweep run.
struct SweepSpec {
  SimulationConfig base;
  std::vector<SweepAxis> axes;  ///< 1 or 2 axes
  std::vector<Metric> metrics;  ///< nonempty
  long long trials = 10000;     ///< Monte Carlo count for ber_mc
  std::uint64_t seed = 1;
  std::string label = "custom";  ///< recipe name or "custom"
};

/// Throws ConfigError when axes/metrics are empty, counts are invalid, or an
/// axis name is not sweepable.
void validate_spec(const SweepSpec& spec);

/// One evaluated grid point. Failed evaluations leave NaNs in `values` and a
/// reason string; the sweep continues.
struct SweepPoint {
  std::vector<double> coords;  ///< one per axis, in axis units
  std::vector<double> values;  ///< one per output column
  std::string skip_reason;     ///< empty when fully evaluated
  double condition_number = std::numeric_limits<double>::quiet_NaN();
};

/// Full sweep output: column names, rows, and the provenance needed to
/// reproduce the run.
struct SweepResult {
  std::vector<std::string> axis_names;
  std::vector<std::string> value_names;  ///< expanded metric columns
  std::vector<SweepPoint> points;        ///< row-major over the grid
  SweepSpec spec;                        ///< resolved snapshot
  std::string version;
  std::string config_digest;
};

/// Evaluates the grid (parallel over points, deterministic under seed) and
/// reports progress on stderr.
SweepResult run_sweep(const SweepSpec& spec);

/// Named experiment presets. Known names:
///   fig3a, fig3b, fig4a, fig4b, fig4c, fig4d, fig9, fig10, ber_curves,
///   sweep_misalign, sweep_N, sweep_D, sweep_R, sweep_r.
/// Throws ConfigError for unknown names.
SweepSpec recipe(const std::string& name);
std::vector<std::string> recipe_names();

/// Builds a spec from a configuration carrying a [sweep] request.
SweepSpec spec_from_config(const SimulationConfig& cfg);

/// CSV: '#'-prefixed metadata (version, label, seed, trials, config digest),
/// then a header row and one data row per grid point. Floats use %.17g; no
/// timestamps, so identical runs serialize identically.
void write_sweep_csv(const SweepResult& result, std::ostream& out);

/// JSON mirror of the same content.
void write_sweep_json(const SweepResult& result, std::ostream& out);

/// Worker threads used by run_sweep: the OAMNFC_WORKERS environment variable
/// when set (clamped to >= 1), else the hardware concurrency.
int worker_count();

}  // namespace oamnfc
