// SPDX-License-Identifier: MIT
#include "oamnfc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "oamnfc/metrics.hpp"
#include "oamnfc/version.hpp"

namespace oamnfc {
namespace {

constexpr double kDegToRad = 3.141592653589793238462643383279502884 / 180.0;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// RFC-4180 style quoting, applied only when the field needs it.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::vector<double> axis_values(const SweepAxis& axis) {
  std::vector<double> values(axis.count);
  for (int i = 0; i < axis.count; ++i)
    values[i] = axis.count == 1
                    ? axis.lo
                    : axis.lo + (axis.hi - axis.lo) * i / (axis.count - 1);
  return values;
}

/// Output columns contributed by one metric.
std::vector<std::string> metric_columns(Metric m) {
  if (m == Metric::bounds) return {"bound_lower", "bound_upper"};
  return {metric_name(m)};
}

int round_count(double value, const std::string& axis_name) {
  const double rounded = std::round(value);
  if (rounded < 1.0)
    throw ConfigError("sweep axis '" + axis_name +
                      "' needs an integer value >= 1");
  return static_cast<int>(rounded);
}

/// Shared per-point state built lazily so that a metric set touching only
/// closed-form quantities never assembles the full matrix.
struct PointContext {
  const SimulationConfig& cfg;
  std::optional<CoilElectrical> elec;
  std::optional<ChannelMatrix> channel;
  double condition = std::numeric_limits<double>::quiet_NaN();

  explicit PointContext(const SimulationConfig& c) : cfg(c) {}

  const CoilElectrical& electrical() {
    if (!elec) {
      cfg.geometry.validate();
      elec = make_electrical(cfg);
    }
    return *elec;
  }

  const ChannelMatrix& link() {
    if (!channel) {
      const CoilElectrical& e = electrical();
      channel = assemble_channel(build_inductance_matrices(cfg.geometry), e,
                                 cfg.flags.crosstalk);
      condition = pseudo_inverse(channel->h).condition_number;
    }
    return *channel;
  }
};

SweepPoint evaluate_point(const SweepSpec& spec, std::size_t index,
                          std::vector<double> coords, int n_columns) {
  SweepPoint point;
  point.coords = std::move(coords);
  point.values.assign(n_columns, std::numeric_limits<double>::quiet_NaN());

  SimulationConfig cfg = spec.base;
  try {
    for (std::size_t a = 0; a < spec.axes.size(); ++a)
      apply_axis_value(cfg, spec.axes[a].name, point.coords[a]);
  } catch (const std::exception& ex) {
    point.skip_reason = ex.what();
    return point;
  }

  PointContext ctx(cfg);
  auto note_failure = [&](Metric m, const std::exception& ex) {
    const std::string reason = metric_name(m) + ": " + ex.what();
    if (point.skip_reason.find(ex.what()) == std::string::npos) {
      if (!point.skip_reason.empty()) point.skip_reason += "; ";
      point.skip_reason += reason;
    }
  };

  int column = 0;
  for (Metric m : spec.metrics) {
    const int width = m == Metric::bounds ? 2 : 1;
    try {
      switch (m) {
        case Metric::capacity_oam:
          point.values[column] = capacity_oam(ctx.link(), cfg.budget).total_bits;
          break;
        case Metric::capacity_ls:
          point.values[column] =
              capacity_ls(ctx.link(), ctx.link().h, cfg.budget).total_bits;
          break;
        case Metric::capacity_siso:
          point.values[column] =
              capacity_siso(cfg.geometry, ctx.electrical(), cfg.budget);
          break;
        case Metric::capacity_mimo:
          point.values[column] = capacity_mimo(
              ctx.link(), cfg.budget, default_correlation_tx(cfg.geometry),
              default_correlation_rx(cfg.geometry), cfg.flags.waterfill);
          break;
        case Metric::ber_analytic:
          point.values[column] = ber_oam_analytic(ctx.link(), cfg.budget);
          break;
        case Metric::ber_mc: {
          LinkBudget one_point = cfg.budget;
          one_point.snr_grid_db.clear();
          const std::vector<BerPoint> run =
              run_ber(ctx.link(), one_point, cfg.flags.detector, spec.trials,
                      derive_seed(spec.seed, index), nullptr, &cfg.pilot);
          point.values[column] = run.front().ber;
          break;
        }
        case Metric::bounds: {
          const std::pair<double, double> b =
              capacity_bounds(cfg.geometry, ctx.electrical(), cfg.budget);
          point.values[column] = b.first;
          point.values[column + 1] = b.second;
          break;
        }
        case Metric::circulant_residual:
          point.values[column] = circulant_residual(reduce_channel(ctx.link()));
          break;
      }
    } catch (const std::exception& ex) {
      note_failure(m, ex);
    }
    column += width;
  }
  point.condition_number = ctx.condition;
  return point;
}

}  // namespace

std::string metric_name(Metric m) {
  switch (m) {
    case Metric::capacity_oam: return "capacity_oam";
    case Metric::capacity_ls: return "capacity_ls";
    case Metric::capacity_siso: return "capacity_siso";
    case Metric::capacity_mimo: return "capacity_mimo";
    case Metric::ber_analytic: return "ber_analytic";
    case Metric::ber_mc: return "ber_mc";
    case Metric::bounds: return "bounds";
    case Metric::circulant_residual: return "circulant_residual";
  }
  throw std::logic_error("metric_name: unhandled enumerator");
}

Metric metric_from_name(const std::string& name) {
  static const std::vector<Metric> all = {
      Metric::capacity_oam, Metric::capacity_ls,   Metric::capacity_siso,
      Metric::capacity_mimo, Metric::ber_analytic, Metric::ber_mc,
      Metric::bounds,        Metric::circulant_residual};
  for (Metric m : all)
    if (metric_name(m) == name) return m;
  throw ConfigError("unknown metric '" + name + "'");
}

std::vector<std::string> sweepable_axis_names() {
  return {"offset_x_mm",       "offset_y_mm",       "tilt_x_deg",
          "tilt_y_deg",        "axial_distance_mm", "ring_radius_mm",
          "ring_radius_tx_mm", "ring_radius_rx_mm", "coil_radius_mm",
          "coil_radius_tx_mm", "coil_radius_rx_mm", "n_tx",
          "n_rx",              "n_coils",           "turns",
          "snr_db"};
}

void apply_axis_value(SimulationConfig& cfg, const std::string& axis_name,
                      double value) {
  LinkGeometry& g = cfg.geometry;
  if (axis_name == "offset_x_mm") {
    g.offset_x = value * 1e-3;
  } else if (axis_name == "offset_y_mm") {
    g.offset_y = value * 1e-3;
  } else if (axis_name == "tilt_x_deg") {
    g.tilt_x = value * kDegToRad;
  } else if (axis_name == "tilt_y_deg") {
    g.tilt_y = value * kDegToRad;
  } else if (axis_name == "axial_distance_mm") {
    g.axial_distance = value * 1e-3;
  } else if (axis_name == "ring_radius_mm") {
    g.ring_radius_tx = g.ring_radius_rx = value * 1e-3;
  } else if (axis_name == "ring_radius_tx_mm") {
    g.ring_radius_tx = value * 1e-3;
  } else if (axis_name == "ring_radius_rx_mm") {
    g.ring_radius_rx = value * 1e-3;
  } else if (axis_name == "coil_radius_mm") {
    g.coil_radius_tx = g.coil_radius_rx = value * 1e-3;
  } else if (axis_name == "coil_radius_tx_mm") {
    g.coil_radius_tx = value * 1e-3;
  } else if (axis_name == "coil_radius_rx_mm") {
    g.coil_radius_rx = value * 1e-3;
  } else if (axis_name == "n_tx") {
    g.n_tx = round_count(value, axis_name);
  } else if (axis_name == "n_rx") {
    g.n_rx = round_count(value, axis_name);
  } else if (axis_name == "n_coils") {
    g.n_tx = g.n_rx = round_count(value, axis_name);
  } else if (axis_name == "turns") {
    g.turns_tx = g.turns_rx = round_count(value, axis_name);
  } else if (axis_name == "snr_db") {
    cfg.budget.noise_power =
        cfg.budget.total_tx_power * std::pow(10.0, -value / 10.0);
    cfg.budget.snr_grid_db = {value};
  } else {
    throw ConfigError("unknown sweep axis '" + axis_name + "'");
  }
}

void validate_spec(const SweepSpec& spec) {
  if (spec.axes.empty() || spec.axes.size() > 2)
    throw ConfigError("sweep needs one or two axes");
  const std::vector<std::string> known = sweepable_axis_names();
  for (const SweepAxis& axis : spec.axes) {
    if (axis.count < 1)
      throw ConfigError("sweep axis '" + axis.name +
                        "' needs a point count >= 1");
    if (std::find(known.begin(), known.end(), axis.name) == known.end())
      throw ConfigError("unknown sweep axis '" + axis.name + "'");
  }
  if (spec.axes.size() == 2 && spec.axes[0].name == spec.axes[1].name)
    throw ConfigError("sweep axes must differ");
  if (spec.metrics.empty()) throw ConfigError("sweep needs at least one metric");
  if (spec.trials < 1) throw ConfigError("sweep trials must be >= 1");
}

SweepResult run_sweep(const SweepSpec& spec) {
  validate_spec(spec);

  SweepResult result;
  result.spec = spec;
  result.version = kVersion;
  result.config_digest = config_digest(spec.base);
  for (const SweepAxis& axis : spec.axes) result.axis_names.push_back(axis.name);
  for (Metric m : spec.metrics)
    for (const std::string& column : metric_columns(m))
      result.value_names.push_back(column);

  std::vector<std::vector<double>> grids;
  for (const SweepAxis& axis : spec.axes) grids.push_back(axis_values(axis));
  std::size_t total = 1;
  for (const auto& grid : grids) total *= grid.size();
  result.points.resize(total);

  const int n_columns = static_cast<int>(result.value_names.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex io_mutex;
  const std::size_t report_every = std::max<std::size_t>(1, total / 20);

  auto worker = [&]() {
    for (;;) {
      const std::size_t index = next.fetch_add(1);
      if (index >= total) return;
      // Row-major: the first axis varies slowest.
      std::vector<double> coords(grids.size());
      std::size_t residue = index;
      for (std::size_t a = grids.size(); a-- > 0;) {
        coords[a] = grids[a][residue % grids[a].size()];
        residue /= grids[a].size();
      }
      result.points[index] =
          evaluate_point(spec, index, std::move(coords), n_columns);
      const std::size_t finished = done.fetch_add(1) + 1;
      if (finished % report_every == 0 || finished == total) {
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cerr << "sweep " << spec.label << ": " << finished << "/" << total
                  << "\n";
      }
    }
  };

  const int workers =
      static_cast<int>(std::min<std::size_t>(worker_count(), total));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return result;
}

SweepSpec recipe(const std::string& name) {
  SweepSpec spec;
  spec.base = default_config();
  spec.label = name;

  auto both_rings = [&](double radius_m) {
    spec.base.geometry.ring_radius_tx = radius_m;
    spec.base.geometry.ring_radius_rx = radius_m;
  };
  // The misalignment and error-rate studies use the multi-turn resonant
  // build: five turns per coil and the matching network tuned to the
  // operating frequency, with transmit coupling compensated away.
  auto resonant_multiturn = [&]() {
    spec.base.geometry.turns_tx = 5;
    spec.base.geometry.turns_rx = 5;
    spec.base.electrical.resonance = spec.base.electrical.frequency;
    spec.base.flags.crosstalk = false;
  };

  if (name == "fig3a" || name == "fig3b" || name == "sweep_misalign") {
    spec.axes = {{"offset_x_mm", 0.0, 25.0, 26}, {"tilt_x_deg", -60.0, 60.0, 25}};
    if (name == "fig3a") {
      resonant_multiturn();
      spec.metrics = {Metric::capacity_oam};
    } else if (name == "fig3b") {
      resonant_multiturn();
      spec.metrics = {Metric::capacity_ls};
    } else {
      spec.metrics = {Metric::capacity_oam, Metric::capacity_ls};
    }
  } else if (name == "fig4a" || name == "fig10") {
    both_rings(50e-3);
    spec.axes = {{"n_tx", 1.0, 20.0, 20}, {"n_rx", 1.0, 20.0, 20}};
    spec.metrics = name == "fig4a"
                       ? std::vector<Metric>{Metric::capacity_ls}
                       : std::vector<Metric>{Metric::capacity_ls,
                                             Metric::capacity_mimo};
  } else if (name == "fig4b") {
    spec.axes = {{"axial_distance_mm", 0.0, 50.0, 51}};
    spec.metrics = {Metric::capacity_ls};
  } else if (name == "fig4c") {
    spec.axes = {{"ring_radius_tx_mm", 20.0, 100.0, 26},
                 {"ring_radius_rx_mm", 20.0, 100.0, 26}};
    spec.metrics = {Metric::capacity_ls};
  } else if (name == "fig4d") {
    both_rings(15e-3);
    spec.axes = {{"coil_radius_tx_mm", 0.0, 15.0, 26},
                 {"coil_radius_rx_mm", 0.0, 15.0, 26}};
    spec.metrics = {Metric::capacity_ls};
  } else if (name == "fig9") {
    spec.axes = {{"snr_db", 0.0, 30.0, 31}};
    spec.metrics = {Metric::capacity_oam, Metric::capacity_siso,
                    Metric::capacity_mimo};
  } else if (name == "ber_curves") {
    resonant_multiturn();
    spec.axes = {{"snr_db", 0.0, 30.0, 31}};
    spec.metrics = {Metric::ber_analytic, Metric::ber_mc};
    spec.trials = 125000;  // 10^6 bits per point for the 8-coil baseline
  } else if (name == "sweep_N") {
    both_rings(50e-3);
    spec.axes = {{"n_coils", 1.0, 16.0, 16}};
    spec.metrics = {Metric::capacity_oam, Metric::capacity_ls};
  } else if (name == "sweep_D") {
    spec.axes = {{"axial_distance_mm", 5.0, 50.0, 46}};
    spec.metrics = {Metric::capacity_oam, Metric::bounds};
  } else if (name == "sweep_R") {
    spec.axes = {{"ring_radius_mm", 20.0, 100.0, 51}};
    spec.metrics = {Metric::capacity_oam, Metric::capacity_ls};
  } else if (name == "sweep_r") {
    both_rings(15e-3);
    spec.axes = {{"coil_radius_rx_mm", 2.5, 5.5, 31}};
    spec.metrics = {Metric::capacity_oam};
  } else {
    throw ConfigError("unknown recipe '" + name + "'");
  }
  return spec;
}

std::vector<std::string> recipe_names() {
  return {"fig3a",  "fig3b",  "fig4a",   "fig4b",         "fig4c",
          "fig4d",  "fig9",   "fig10",   "ber_curves",    "sweep_misalign",
          "sweep_N", "sweep_D", "sweep_R", "sweep_r"};
}

SweepSpec spec_from_config(const SimulationConfig& cfg) {
  if (!cfg.sweep)
    throw ConfigError("configuration carries no sweep section");
  SweepSpec spec;
  spec.base = cfg;
  spec.base.sweep.reset();
  for (const SweepRequest::Axis& axis : cfg.sweep->axes)
    spec.axes.push_back({axis.name, axis.lo, axis.hi, axis.count});
  for (const std::string& metric : cfg.sweep->metrics)
    spec.metrics.push_back(metric_from_name(metric));
  spec.trials = cfg.sweep->trials.value_or(cfg.trials);
  spec.seed = cfg.seed;
  spec.label = "custom";
  validate_spec(spec);
  return spec;
}

void write_sweep_csv(const SweepResult& result, std::ostream& out) {
  out << "# oamnfc sweep\n";
  out << "# version: " << result.version << "\n";
  out << "# label: " << result.spec.label << "\n";
  out << "# seed: " << result.spec.seed << "\n";
  out << "# trials: " << result.spec.trials << "\n";
  out << "# config: " << result.config_digest << "\n";
  for (std::size_t a = 0; a < result.axis_names.size(); ++a)
    out << (a ? "," : "") << result.axis_names[a];
  for (const std::string& name : result.value_names) out << "," << name;
  out << ",condition_number,skip_reason\n";
  for (const SweepPoint& point : result.points) {
    for (std::size_t a = 0; a < point.coords.size(); ++a)
      out << (a ? "," : "") << format_double(point.coords[a]);
    for (double v : point.values) out << "," << format_double(v);
    out << "," << format_double(point.condition_number) << ","
        << csv_field(point.skip_reason) << "\n";
  }
}

void write_sweep_json(const SweepResult& result, std::ostream& out) {
  nlohmann::json doc;
  doc["version"] = result.version;
  doc["label"] = result.spec.label;
  doc["seed"] = result.spec.seed;
  doc["trials"] = result.spec.trials;
  doc["config_digest"] = result.config_digest;
  doc["axes"] = result.axis_names;
  doc["values"] = result.value_names;
  nlohmann::json points = nlohmann::json::array();
  for (const SweepPoint& point : result.points) {
    nlohmann::json row;
    row["coords"] = point.coords;
    row["values"] = point.values;
    row["condition_number"] = point.condition_number;
    row["skip_reason"] = point.skip_reason;
    points.push_back(std::move(row));
  }
  doc["points"] = std::move(points);
  out << doc.dump(2) << "\n";
}

int worker_count() {
  if (const char* env = std::getenv("OAMNFC_WORKERS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed >= 1) return static_cast<int>(parsed);
    return 1;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

}  // namespace oamnfc
