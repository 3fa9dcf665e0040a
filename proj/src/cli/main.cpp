// SPDX-License-Identifier: MIT
/// @file main.cpp
/// @brief Command-line front end: channel inspection, metric evaluation at an
///        SNR grid, parameter sweeps, and S-parameter import.
///
/// Exit codes: 0 success, 2 configuration/usage error, 3 computation failure.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oamnfc/channel.hpp"
#include "oamnfc/config.hpp"
#include "oamnfc/harness.hpp"
#include "oamnfc/metrics.hpp"
#include "oamnfc/version.hpp"

namespace {

using namespace oamnfc;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

SimulationConfig load_or_default(const std::string& path) {
  return path.empty() ? default_config() : load_config(path);
}

/// Opens `path` for writing, or aliases stdout when the path is empty.
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_)
        throw std::runtime_error("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  bool to_file() const { return file_.is_open(); }

 private:
  std::ofstream file_;
};

void dump_matrix(std::ostream& out, const std::string& tag,
                 const Eigen::MatrixXcd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out << tag << "," << r << "," << c << "," << fmt(m(r, c).real()) << ","
          << fmt(m(r, c).imag()) << "\n";
}

void dump_matrix(std::ostream& out, const std::string& tag,
                 const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out << tag << "," << r << "," << c << "," << fmt(m(r, c)) << ",0\n";
}

int cmd_channel(const std::string& config_path, const std::string& out_path) {
  const SimulationConfig cfg = load_or_default(config_path);
  const CoilElectrical elec = make_electrical(cfg);
  const MutualInductanceMatrix mi = build_inductance_matrices(cfg.geometry);
  const ChannelMatrix ch = assemble_channel(mi, elec, cfg.flags.crosstalk);
  const PseudoInverse pi = pseudo_inverse(ch.h);

  OutputTarget target(out_path);
  std::ostream& csv = target.stream();
  // Diagnostics go to stdout when the table goes to a file, and to stderr
  // when the table itself occupies stdout.
  std::ostream& diag = target.to_file() ? std::cout : std::cerr;

  csv << "matrix,row,col,re,im\n";
  dump_matrix(csv, "H", ch.h);
  dump_matrix(csv, "M", mi.tx_rx);
  dump_matrix(csv, "Mt", mi.tx_tx);
  if (cfg.geometry.n_rx % cfg.geometry.n_tx == 0) {
    const ReducedChannel rc = reduce_channel(ch);
    dump_matrix(csv, "Hhat", rc.h_hat);
    const OamSpectrum spectrum = oam_spectrum(rc);
    for (Eigen::Index l = 0; l < spectrum.diagonal.size(); ++l)
      csv << "h_oam," << l << ",0," << fmt(spectrum.diagonal(l).real()) << ","
          << fmt(spectrum.diagonal(l).imag()) << "\n";
    diag << "circulant_residual " << fmt(circulant_residual(rc)) << "\n";
  } else {
    diag << "reduction skipped: receive count " << cfg.geometry.n_rx
         << " is not a multiple of transmit count " << cfg.geometry.n_tx
         << "\n";
  }
  diag << "condition_number " << fmt(pi.condition_number) << "\n";
  return 0;
}

/// SNR points evaluated by `evaluate` / `import-s`: the configured grid, or
/// the budget's own operating point when no grid is given. Positive transmit
/// power re-derives the noise from each grid value; zero power keeps the
/// configured noise (the SNR is then undefined and capacities are zero).
std::vector<std::pair<double, LinkBudget>> snr_points(
    const SimulationConfig& cfg) {
  std::vector<std::pair<double, LinkBudget>> points;
  LinkBudget base = cfg.budget;
  base.snr_grid_db.clear();
  if (cfg.budget.snr_grid_db.empty()) {
    const double snr =
        10.0 * std::log10(cfg.budget.total_tx_power / cfg.budget.noise_power);
    points.emplace_back(snr, base);
    return points;
  }
  for (double snr : cfg.budget.snr_grid_db) {
    LinkBudget b = base;
    if (b.total_tx_power > 0.0)
      b.noise_power = b.total_tx_power * std::pow(10.0, -snr / 10.0);
    points.emplace_back(snr, b);
  }
  return points;
}

void print_table(const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows,
                 const std::string& out_path) {
  for (std::size_t c = 0; c < header.size(); ++c)
    std::cout << (c ? "  " : "") << header[c];
  std::cout << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      std::cout << (c ? "  " : "") << fmt_short(row[c]);
    std::cout << "\n";
  }
  if (out_path.empty()) return;
  OutputTarget target(out_path);
  std::ostream& csv = target.stream();
  for (std::size_t c = 0; c < header.size(); ++c)
    csv << (c ? "," : "") << header[c];
  csv << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      csv << (c ? "," : "") << fmt(row[c]);
    csv << "\n";
  }
}

int cmd_evaluate(const std::string& config_path, const std::string& out_path,
                 std::vector<std::string> schemes, bool with_bounds) {
  const SimulationConfig cfg = load_or_default(config_path);
  if (schemes.empty())
    schemes = {"capacity_oam", "capacity_ls", "capacity_siso", "capacity_mimo",
               "ber_analytic"};
  const CoilElectrical elec = make_electrical(cfg);
  const ChannelMatrix ch = assemble_channel(
      build_inductance_matrices(cfg.geometry), elec, cfg.flags.crosstalk);
  const Eigen::MatrixXd corr_tx = default_correlation_tx(cfg.geometry);
  const Eigen::MatrixXd corr_rx = default_correlation_rx(cfg.geometry);

  std::vector<std::string> header = {"snr_db"};
  for (const std::string& s : schemes) header.push_back(s);
  if (with_bounds) {
    header.push_back("bound_lower");
    header.push_back("bound_upper");
  }

  std::vector<std::vector<double>> rows;
  for (const auto& [snr, budget] : snr_points(cfg)) {
    std::vector<double> row = {snr};
    for (const std::string& s : schemes) {
      if (s == "capacity_oam")
        row.push_back(capacity_oam(ch, budget).total_bits);
      else if (s == "capacity_ls")
        row.push_back(capacity_ls(ch, ch.h, budget).total_bits);
      else if (s == "capacity_siso")
        row.push_back(capacity_siso(cfg.geometry, elec, budget));
      else if (s == "capacity_mimo")
        row.push_back(capacity_mimo(ch, budget, corr_tx, corr_rx,
                                    cfg.flags.waterfill));
      else if (s == "ber_analytic")
        row.push_back(ber_oam_analytic(ch, budget));
      else
        throw ConfigError("unknown scheme '" + s + "'");
    }
    if (with_bounds) {
      const auto [lo, hi] = capacity_bounds(cfg.geometry, elec, budget);
      row.push_back(lo);
      row.push_back(hi);
    }
    rows.push_back(std::move(row));
  }
  print_table(header, rows, out_path);
  return 0;
}

int cmd_sweep(const std::string& recipe_name, const std::string& config_path,
              const std::string& out_path, bool as_json,
              const std::uint64_t* seed, const long long* trials) {
  SweepSpec spec;
  if (!recipe_name.empty()) {
    if (!config_path.empty())
      throw ConfigError("give either a recipe name or --config, not both");
    spec = recipe(recipe_name);
  } else {
    if (config_path.empty())
      throw ConfigError(
          "sweep needs a recipe name or a --config file with a [sweep] "
          "section");
    spec = spec_from_config(load_config(config_path));
  }
  if (seed) spec.seed = *seed;
  if (trials) spec.trials = *trials;

  const SweepResult result = run_sweep(spec);
  OutputTarget target(out_path);
  if (as_json)
    write_sweep_json(result, target.stream());
  else
    write_sweep_csv(result, target.stream());
  return 0;
}

int cmd_import_s(const std::string& sparam_path, const std::string& config_path,
                 const std::string& out_path) {
  const SimulationConfig cfg = load_or_default(config_path);
  const SParameterDocument doc = read_s_parameters_file(sparam_path);
  const ChannelMatrix ch = import_s_parameters(doc);

  std::vector<std::string> header = {"snr_db", "capacity_ls", "ber_ls"};
  std::vector<std::vector<double>> rows;
  for (const auto& [snr, budget] : snr_points(cfg)) {
    rows.push_back({snr, capacity_ls(ch, ch.h, budget).total_bits,
                    ber_ls(ch, ch.h, budget)});
  }
  print_table(header, rows, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-field coil-array link simulator"};
  app.set_version_flag("--version", oamnfc::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string recipe_name;
  std::string sparam_path;
  std::uint64_t seed = 0;
  long long trials = 0;
  bool with_bounds = false;
  bool as_json = false;
  std::vector<std::string> schemes;

  std::function<int()> run;

  CLI::App* channel = app.add_subcommand("channel", "Dump channel matrices");
  channel->add_option("--config", config_path, "configuration file");
  channel->add_option("--out", out_path, "output CSV path (default stdout)");
  channel->callback([&]() { run = [&]() { return cmd_channel(config_path, out_path); }; });

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Evaluate metrics over the SNR grid");
  evaluate->add_option("--config", config_path, "configuration file");
  evaluate->add_option("--out", out_path, "CSV copy of the table");
  evaluate->add_option("--schemes", schemes,
                       "comma-separated metric list")
      ->delimiter(',');
  evaluate->add_flag("--bounds", with_bounds,
                     "append closed-form capacity bounds columns");
  evaluate->callback([&]() {
    run = [&]() { return cmd_evaluate(config_path, out_path, schemes, with_bounds); };
  });

  CLI::App* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("recipe", recipe_name, "named recipe");
  sweep->add_option("--config", config_path,
                    "configuration file with a [sweep] section");
  sweep->add_option("--out", out_path, "output path (default stdout)");
  CLI::Option* seed_opt = sweep->add_option("--seed", seed, "random seed");
  CLI::Option* trials_opt =
      sweep->add_option("--trials", trials, "Monte Carlo trials per point");
  sweep->add_flag("--json", as_json, "emit JSON instead of CSV");
  sweep->callback([&, seed_opt, trials_opt]() {
    run = [&, seed_opt, trials_opt]() {
      return cmd_sweep(recipe_name, config_path, out_path, as_json,
                       seed_opt->count() ? &seed : nullptr,
                       trials_opt->count() ? &trials : nullptr);
    };
  });

  CLI::App* import_s = app.add_subcommand(
      "import-s", "Evaluate a channel imported from an S-parameter file");
  import_s->add_option("file", sparam_path, "S-parameter CSV document")
      ->required();
  import_s->add_option("--config", config_path, "configuration file");
  import_s->add_option("--out", out_path, "CSV copy of the table");
  import_s->callback([&]() {
    run = [&]() { return cmd_import_s(sparam_path, config_path, out_path); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return run();
  } catch (const oamnfc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
