// SPDX-License-Identifier: MIT
#include "oamnfc/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace oamnfc {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail_at(const std::string& origin, long line,
                          const std::string& what) {
  std::ostringstream msg;
  msg << origin << ":" << line << ": " << what;
  throw ConfigError(msg.str());
}

struct Entry {
  std::string value;
  long line = 0;
};

using Section = std::map<std::string, Entry>;

double parse_double(const std::string& origin, const Entry& e,
                    const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    fail_at(origin, e.line, "value of '" + key + "' is not a number");
  }
}

long long parse_int(const std::string& origin, const Entry& e,
                    const std::string& key) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    fail_at(origin, e.line, "value of '" + key + "' is not an integer");
  }
}

bool parse_bool(const std::string& origin, const Entry& e,
                const std::string& key) {
  if (e.value == "on" || e.value == "true" || e.value == "1") return true;
  if (e.value == "off" || e.value == "false" || e.value == "0") return false;
  fail_at(origin, e.line, "value of '" + key + "' must be on/off");
}

/// Grid values: either comma-separated numbers or a lo:hi:count span.
std::vector<double> parse_grid(const std::string& origin, const Entry& e,
                               const std::string& key) {
  std::vector<double> out;
  if (e.value.find(':') != std::string::npos) {
    double lo = 0.0, hi = 0.0;
    long count = 0;
    char extra = 0;
    if (std::sscanf(e.value.c_str(), "%lf:%lf:%ld%c", &lo, &hi, &count,
                    &extra) != 3 ||
        count < 1)
      fail_at(origin, e.line, "'" + key + "' span must be lo:hi:count");
    for (long i = 0; i < count; ++i)
      out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    return out;
  }
  std::istringstream ss(e.value);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cell = trim(cell);
    if (cell.empty()) fail_at(origin, e.line, "'" + key + "' has an empty item");
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail_at(origin, e.line, "'" + key + "' has a non-numeric item");
    }
  }
  if (out.empty()) fail_at(origin, e.line, "'" + key + "' is empty");
  return out;
}

/// Pulls a key out of a section (erasing it so leftovers can be reported).
std::optional<Entry> take(Section& sec, const std::string& key) {
  auto it = sec.find(key);
  if (it == sec.end()) return std::nullopt;
  Entry e = it->second;
  sec.erase(it);
  return e;
}

void reject_leftovers(const std::string& origin, const Section& sec,
                      const std::string& section_name) {
  if (sec.empty()) return;
  const auto& [key, entry] = *sec.begin();
  fail_at(origin, entry.line,
          "unknown key '" + key + "' in section [" + section_name + "]");
}

}  // namespace

SimulationConfig default_config() {
  SimulationConfig cfg;
  cfg.geometry.n_tx = 8;
  cfg.geometry.n_rx = 8;
  cfg.geometry.ring_radius_tx = 0.025;
  cfg.geometry.ring_radius_rx = 0.025;
  cfg.geometry.coil_radius_tx = 0.005;
  cfg.geometry.coil_radius_rx = 0.005;
  cfg.geometry.turns_tx = 1;
  cfg.geometry.turns_rx = 1;
  cfg.geometry.axial_distance = 0.025;
  cfg.geometry.offset_x = 0.0;
  cfg.geometry.offset_y = 0.0;
  cfg.geometry.tilt_x = 0.0;
  cfg.geometry.tilt_y = 0.0;
  cfg.budget.total_tx_power = 8.0;
  cfg.budget.noise_power = 0.08;
  cfg.pilot.length = 17;
  cfg.pilot.root = 1;
  cfg.pilot.pilot_snr = 1e6;  // 60 dB
  return cfg;
}

SimulationConfig parse_config(const std::string& text,
                              const std::string& origin) {
  std::map<std::string, Section> sections;
  std::map<std::string, long> section_lines;
  {
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    std::string current;
    bool have_section = false;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#' || t[0] == ';') continue;
      if (t.front() == '[') {
        if (t.back() != ']')
          fail_at(origin, line_no, "unterminated section header");
        current = trim(t.substr(1, t.size() - 2));
        if (current.empty()) fail_at(origin, line_no, "empty section name");
        if (sections.count(current))
          fail_at(origin, line_no, "duplicate section [" + current + "]");
        sections[current];
        section_lines[current] = line_no;
        have_section = true;
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        fail_at(origin, line_no, "expected key = value");
      if (!have_section)
        fail_at(origin, line_no, "key/value before any [section]");
      const std::string key = trim(t.substr(0, eq));
      const std::string value = trim(t.substr(eq + 1));
      if (key.empty()) fail_at(origin, line_no, "empty key");
      Section& sec = sections[current];
      if (sec.count(key))
        fail_at(origin, line_no, "duplicate key '" + key + "'");
      sec[key] = Entry{value, line_no};
    }
  }

  static const std::set<std::string> known_sections = {
      "geometry", "electrical", "budget", "pilot", "flags", "sweep"};
  for (const auto& [name, sec] : sections)
    if (!known_sections.count(name))
      fail_at(origin, section_lines[name], "unknown section [" + name + "]");

  SimulationConfig cfg = default_config();

  if (sections.count("geometry")) {
    Section& s = sections["geometry"];
    LinkGeometry& g = cfg.geometry;
    if (auto e = take(s, "n_tx")) g.n_tx = static_cast<int>(parse_int(origin, *e, "n_tx"));
    if (auto e = take(s, "n_rx")) g.n_rx = static_cast<int>(parse_int(origin, *e, "n_rx"));
    if (auto e = take(s, "ring_radius_mm")) {
      const double v = parse_double(origin, *e, "ring_radius_mm") * 1e-3;
      g.ring_radius_tx = g.ring_radius_rx = v;
    }
    if (auto e = take(s, "ring_radius_tx_mm"))
      g.ring_radius_tx = parse_double(origin, *e, "ring_radius_tx_mm") * 1e-3;
    if (auto e = take(s, "ring_radius_rx_mm"))
      g.ring_radius_rx = parse_double(origin, *e, "ring_radius_rx_mm") * 1e-3;
    if (auto e = take(s, "coil_radius_mm")) {
      const double v = parse_double(origin, *e, "coil_radius_mm") * 1e-3;
      g.coil_radius_tx = g.coil_radius_rx = v;
    }
    if (auto e = take(s, "coil_radius_tx_mm"))
      g.coil_radius_tx = parse_double(origin, *e, "coil_radius_tx_mm") * 1e-3;
    if (auto e = take(s, "coil_radius_rx_mm"))
      g.coil_radius_rx = parse_double(origin, *e, "coil_radius_rx_mm") * 1e-3;
    if (auto e = take(s, "turns")) {
      const int v = static_cast<int>(parse_int(origin, *e, "turns"));
      g.turns_tx = g.turns_rx = v;
    }
    if (auto e = take(s, "turns_tx"))
      g.turns_tx = static_cast<int>(parse_int(origin, *e, "turns_tx"));
    if (auto e = take(s, "turns_rx"))
      g.turns_rx = static_cast<int>(parse_int(origin, *e, "turns_rx"));
    if (auto e = take(s, "axial_distance_mm"))
      g.axial_distance = parse_double(origin, *e, "axial_distance_mm") * 1e-3;
    if (auto e = take(s, "offset_x_mm"))
      g.offset_x = parse_double(origin, *e, "offset_x_mm") * 1e-3;
    if (auto e = take(s, "offset_y_mm"))
      g.offset_y = parse_double(origin, *e, "offset_y_mm") * 1e-3;
    if (auto e = take(s, "tilt_x_deg"))
      g.tilt_x = parse_double(origin, *e, "tilt_x_deg") * kPi / 180.0;
    if (auto e = take(s, "tilt_y_deg"))
      g.tilt_y = parse_double(origin, *e, "tilt_y_deg") * kPi / 180.0;
    reject_leftovers(origin, s, "geometry");
  }

  if (sections.count("electrical")) {
    Section& s = sections["electrical"];
    ElectricalConfig& e_cfg = cfg.electrical;
    if (auto e = take(s, "frequency_mhz"))
      e_cfg.frequency = parse_double(origin, *e, "frequency_mhz") * 1e6;
    if (auto e = take(s, "resonance_mhz"))
      e_cfg.resonance = parse_double(origin, *e, "resonance_mhz") * 1e6;
    if (auto e = take(s, "resistivity_ohm_mm2_per_m"))
      e_cfg.resistivity =
          parse_double(origin, *e, "resistivity_ohm_mm2_per_m") * 1e-6;
    if (auto e = take(s, "wire_cross_section_mm2"))
      e_cfg.wire_cross_section =
          parse_double(origin, *e, "wire_cross_section_mm2") * 1e-6;
    const auto l = take(s, "inductance_h");
    const auto c = take(s, "capacitance_f");
    const auto r = take(s, "resistance_ohm");
    if (l || c || r) {
      if (!(l && c && r))
        fail_at(origin, section_lines["electrical"],
                "explicit electrical override needs all of inductance_h, "
                "capacitance_f, resistance_ohm");
      e_cfg.has_lcr_override = true;
      e_cfg.inductance = parse_double(origin, *l, "inductance_h");
      e_cfg.capacitance = parse_double(origin, *c, "capacitance_f");
      e_cfg.resistance = parse_double(origin, *r, "resistance_ohm");
    }
    reject_leftovers(origin, s, "electrical");
  }

  if (sections.count("budget")) {
    Section& s = sections["budget"];
    if (auto e = take(s, "total_power_w"))
      cfg.budget.total_tx_power = parse_double(origin, *e, "total_power_w");
    if (auto e = take(s, "noise_power_w"))
      cfg.budget.noise_power = parse_double(origin, *e, "noise_power_w");
    if (auto e = take(s, "snr_db"))
      cfg.budget.snr_grid_db = parse_grid(origin, *e, "snr_db");
    reject_leftovers(origin, s, "budget");
  }

  if (sections.count("pilot")) {
    Section& s = sections["pilot"];
    if (auto e = take(s, "length"))
      cfg.pilot.length = static_cast<int>(parse_int(origin, *e, "length"));
    if (auto e = take(s, "root"))
      cfg.pilot.root = static_cast<int>(parse_int(origin, *e, "root"));
    if (auto e = take(s, "pilot_snr_db"))
      cfg.pilot.pilot_snr =
          std::pow(10.0, parse_double(origin, *e, "pilot_snr_db") / 10.0);
    reject_leftovers(origin, s, "pilot");
  }

  if (sections.count("flags")) {
    Section& s = sections["flags"];
    if (auto e = take(s, "crosstalk"))
      cfg.flags.crosstalk = parse_bool(origin, *e, "crosstalk");
    if (auto e = take(s, "convention")) {
      if (e->value == "full_pi")
        cfg.flags.convention = EllipticConvention::full_pi;
      else if (e->value == "half_pi")
        cfg.flags.convention = EllipticConvention::half_pi;
      else
        fail_at(origin, e->line, "convention must be full_pi or half_pi");
    }
    if (auto e = take(s, "detector")) {
      if (e->value == "blind") cfg.flags.detector = DetectorKind::blind;
      else if (e->value == "ls") cfg.flags.detector = DetectorKind::ls;
      else fail_at(origin, e->line, "detector must be blind or ls");
    }
    if (auto e = take(s, "waterfill"))
      cfg.flags.waterfill = parse_bool(origin, *e, "waterfill");
    if (auto e = take(s, "seed"))
      cfg.seed = static_cast<std::uint64_t>(parse_int(origin, *e, "seed"));
    if (auto e = take(s, "trials")) {
      cfg.trials = parse_int(origin, *e, "trials");
      if (cfg.trials < 1) fail_at(origin, e->line, "trials must be >= 1");
    }
    reject_leftovers(origin, s, "flags");
  }

  if (sections.count("sweep")) {
    Section& s = sections["sweep"];
    SweepRequest req;
    for (const char* axis_key : {"axis1", "axis2"}) {
      auto e = take(s, axis_key);
      if (!e) continue;
      SweepRequest::Axis ax;
      char name_buf[128] = {0};
      long count = 0;
      char extra = 0;
      if (std::sscanf(e->value.c_str(), "%127[^,],%lf,%lf,%ld%c", name_buf,
                      &ax.lo, &ax.hi, &count, &extra) != 4 ||
          count < 1)
        fail_at(origin, e->line,
                std::string(axis_key) + " must be name,lo,hi,count");
      ax.name = trim(name_buf);
      ax.count = static_cast<int>(count);
      req.axes.push_back(ax);
    }
    if (auto e = take(s, "metrics")) {
      std::istringstream ss(e->value);
      std::string cell;
      while (std::getline(ss, cell, ',')) {
        cell = trim(cell);
        if (!cell.empty()) req.metrics.push_back(cell);
      }
      if (req.metrics.empty()) fail_at(origin, e->line, "metrics list is empty");
    }
    if (auto e = take(s, "trials")) {
      req.trials = parse_int(origin, *e, "trials");
      if (*req.trials < 1) fail_at(origin, e->line, "trials must be >= 1");
    }
    reject_leftovers(origin, s, "sweep");
    if (req.axes.empty())
      fail_at(origin, section_lines["sweep"], "[sweep] needs at least axis1");
    cfg.sweep = req;
  }

  // Schema-level validation before any computation.
  try {
    cfg.geometry.validate();
  } catch (const std::exception& ex) {
    throw ConfigError(origin + ": " + ex.what());
  }
  if (!(cfg.electrical.frequency > 0.0) || !(cfg.electrical.resonance > 0.0))
    throw ConfigError(origin + ": frequencies must be > 0");
  if (!(cfg.budget.total_tx_power >= 0.0))
    throw ConfigError(origin + ": total_power_w must be >= 0");
  if (!(cfg.budget.noise_power > 0.0))
    throw ConfigError(origin + ": noise_power_w must be > 0");
  if (cfg.pilot.length <= std::max(cfg.geometry.n_tx, cfg.geometry.n_rx))
    throw ConfigError(origin + ": pilot length must exceed both coil counts");
  return cfg;
}

SimulationConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string canonical_config_string(const SimulationConfig& cfg) {
  std::ostringstream out;
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  const LinkGeometry& g = cfg.geometry;
  out << "n_tx=" << g.n_tx << ";n_rx=" << g.n_rx
      << ";ring_radius_tx=" << num(g.ring_radius_tx)
      << ";ring_radius_rx=" << num(g.ring_radius_rx)
      << ";coil_radius_tx=" << num(g.coil_radius_tx)
      << ";coil_radius_rx=" << num(g.coil_radius_rx)
      << ";turns_tx=" << g.turns_tx << ";turns_rx=" << g.turns_rx
      << ";axial_distance=" << num(g.axial_distance)
      << ";offset_x=" << num(g.offset_x) << ";offset_y=" << num(g.offset_y)
      << ";tilt_x=" << num(g.tilt_x) << ";tilt_y=" << num(g.tilt_y)
      << ";frequency=" << num(cfg.electrical.frequency)
      << ";resonance=" << num(cfg.electrical.resonance)
      << ";resistivity=" << num(cfg.electrical.resistivity)
      << ";wire_cross_section=" << num(cfg.electrical.wire_cross_section)
      << ";lcr_override=" << (cfg.electrical.has_lcr_override ? 1 : 0);
  if (cfg.electrical.has_lcr_override)
    out << ";inductance=" << num(cfg.electrical.inductance)
        << ";capacitance=" << num(cfg.electrical.capacitance)
        << ";resistance=" << num(cfg.electrical.resistance);
  out << ";total_tx_power=" << num(cfg.budget.total_tx_power)
      << ";noise_power=" << num(cfg.budget.noise_power) << ";snr_grid=";
  for (std::size_t i = 0; i < cfg.budget.snr_grid_db.size(); ++i)
    out << (i ? "," : "") << num(cfg.budget.snr_grid_db[i]);
  out << ";pilot_length=" << cfg.pilot.length
      << ";pilot_root=" << cfg.pilot.root
      << ";pilot_snr=" << num(cfg.pilot.pilot_snr)
      << ";crosstalk=" << (cfg.flags.crosstalk ? 1 : 0) << ";convention="
      << (cfg.flags.convention == EllipticConvention::full_pi ? "full_pi"
                                                              : "half_pi")
      << ";detector="
      << (cfg.flags.detector == DetectorKind::blind ? "blind" : "ls")
      << ";waterfill=" << (cfg.flags.waterfill ? 1 : 0)
      << ";seed=" << cfg.seed << ";trials=" << cfg.trials;
  return out.str();
}

std::string config_digest(const SimulationConfig& cfg) {
  const std::string s = canonical_config_string(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

CoilElectrical make_electrical(const SimulationConfig& cfg) {
  if (cfg.electrical.has_lcr_override)
    return coil_electrical_from_lcr(cfg.electrical.frequency,
                                    cfg.electrical.inductance,
                                    cfg.electrical.capacitance,
                                    cfg.electrical.resistance);
  return coil_electrical(cfg.geometry, cfg.electrical.frequency,
                         cfg.electrical.resonance, cfg.electrical.resistivity,
                         cfg.electrical.wire_cross_section);
}

}  // namespace oamnfc
