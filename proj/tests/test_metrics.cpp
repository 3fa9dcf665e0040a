// SPDX-License-Identifier: MIT
#include <cmath>
#include <complex>

#include <doctest.h>

#include "oamnfc/config.hpp"
#include "oamnfc/metrics.hpp"

using namespace oamnfc;

namespace {

ChannelMatrix channel_for(const SimulationConfig& cfg, bool crosstalk) {
  return assemble_channel(build_inductance_matrices(cfg.geometry),
                          make_electrical(cfg), crosstalk);
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

}  // namespace

TEST_CASE("mode spectrum of an aligned link is diagonal") {
  const SimulationConfig cfg = default_config();
  const OamSpectrum sp = oam_spectrum(reduce_channel(channel_for(cfg, true)));
  REQUIRE(sp.diagonal.size() == 8);
  const double gain2 = sp.diagonal.cwiseAbs().maxCoeff() *
                       sp.diagonal.cwiseAbs().maxCoeff();
  CHECK(sp.offdiag_power_per_mode.maxCoeff() < 1e-20 * gain2);
  // The transform really is a similarity: same Frobenius norm.
  const ReducedChannel rc = reduce_channel(channel_for(cfg, true));
  CHECK(rel_err(sp.matrix.norm(), rc.h_hat.norm()) < 1e-12);
}

TEST_CASE("reduced-path capacity: endpoints, shape guard, fold gain") {
  const SimulationConfig cfg = default_config();
  const ChannelMatrix ch = channel_for(cfg, true);
  LinkBudget budget = cfg.budget;

  const CapacityReport rep = capacity_oam(ch, budget);
  REQUIRE(rep.per_mode_sinr.size() == 8);
  CHECK(rep.total_bits > 0.0);
  CHECK(rep.scheme == CapacityScheme::oam_blind);

  LinkBudget dark = budget;
  dark.total_tx_power = 0.0;
  const CapacityReport zero = capacity_oam(ch, dark);
  CHECK(zero.total_bits == 0.0);
  CHECK(zero.per_mode_sinr.cwiseAbs().maxCoeff() == 0.0);

  ChannelMatrix ragged = ch;
  ragged.h.resize(12, 8);
  ragged.h.setZero();
  CHECK_THROWS_AS(capacity_oam(ragged, budget), std::invalid_argument);

  // Duplicating every receive row doubles the averaging gain exactly.
  ChannelMatrix doubled = ch;
  doubled.h.resize(16, 8);
  for (int m = 0; m < 16; ++m) doubled.h.row(m) = ch.h.row(m / 2);
  const CapacityReport two = capacity_oam(doubled, budget);
  for (int l = 0; l < 8; ++l)
    CHECK(rel_err(two.per_mode_sinr(l), 2.0 * rep.per_mode_sinr(l)) < 1e-12);
}

TEST_CASE("reduced-path capacity grows with power and falls with noise") {
  SimulationConfig cfg = default_config();
  cfg.geometry.offset_x = 0.008;  // make the interference terms nonzero
  const ChannelMatrix ch = channel_for(cfg, true);
  LinkBudget budget = cfg.budget;

  const double base = capacity_oam(ch, budget).total_bits;
  LinkBudget strong = budget;
  strong.total_tx_power *= 2.0;
  CHECK(capacity_oam(ch, strong).total_bits > base);
  LinkBudget quiet = budget;
  quiet.noise_power /= 2.0;
  CHECK(capacity_oam(ch, quiet).total_bits > base);
}

TEST_CASE("analytic error rate has the right endpoints") {
  const SimulationConfig cfg = default_config();
  const ChannelMatrix ch = channel_for(cfg, true);
  LinkBudget budget = cfg.budget;

  LinkBudget dark = budget;
  dark.total_tx_power = 0.0;
  CHECK(ber_oam_analytic(ch, dark) == doctest::Approx(0.5).epsilon(1e-12));

  LinkBudget blasting = budget;
  blasting.noise_power = budget.noise_power * 1e-12;
  CHECK(ber_oam_analytic(ch, blasting) < 1e-12);

  const double ber = ber_oam_analytic(ch, budget);
  CHECK(ber >= 0.0);
  CHECK(ber <= 0.5);
}

TEST_CASE("geometry-only capacity matches the assembled crosstalk-free link") {
  SimulationConfig cfg = default_config();
  const CoilElectrical elec = make_electrical(cfg);

  const CapacityReport direct =
      capacity_oam(channel_for(cfg, false), cfg.budget);
  const CapacityReport quick =
      capacity_oam_simplified(cfg.geometry, elec, cfg.budget);
  CHECK(rel_err(quick.total_bits, direct.total_bits) < 1e-6);
  for (int l = 0; l < 8; ++l)
    CHECK(rel_err(quick.per_mode_sinr(l), direct.per_mode_sinr(l)) < 1e-6);

  SimulationConfig off = cfg;
  off.geometry.offset_x = 0.001;
  CHECK_THROWS_AS(capacity_oam_simplified(off.geometry, elec, cfg.budget),
                  std::invalid_argument);
  SimulationConfig tilted = cfg;
  tilted.geometry.tilt_y = 0.01;
  CHECK_THROWS_AS(capacity_oam_simplified(tilted.geometry, elec, cfg.budget),
                  std::invalid_argument);
}

TEST_CASE("geometry-only capacity: single pair reduces to the scalar link") {
  SimulationConfig cfg = default_config();
  cfg.geometry.n_tx = 1;
  cfg.geometry.n_rx = 1;
  const CoilElectrical elec = make_electrical(cfg);
  const CapacityReport rep =
      capacity_oam_simplified(cfg.geometry, elec, cfg.budget);
  const double siso = capacity_siso(cfg.geometry, elec, cfg.budget);
  CHECK(rel_err(rep.total_bits, siso) < 1e-9);
}

TEST_CASE("doubling receive turns quadruples every mode SINR") {
  SimulationConfig cfg = default_config();
  const CoilElectrical elec = make_electrical(cfg);
  const CapacityReport one =
      capacity_oam_simplified(cfg.geometry, elec, cfg.budget);
  SimulationConfig twice = cfg;
  twice.geometry.turns_rx = 2;
  const CapacityReport four =
      capacity_oam_simplified(twice.geometry, elec, cfg.budget);
  for (int l = 0; l < 8; ++l)
    CHECK(rel_err(four.per_mode_sinr(l), 4.0 * one.per_mode_sinr(l)) < 1e-12);
}

TEST_CASE("closed-form bounds sandwich the geometry-only capacity") {
  SimulationConfig cfg = default_config();
  cfg.geometry.ring_radius_tx = 0.025;
  cfg.geometry.ring_radius_rx = 0.035;
  const CoilElectrical elec = make_electrical(cfg);
  for (double d_mm : {10.0, 25.0, 40.0}) {
    cfg.geometry.axial_distance = d_mm * 1e-3;
    const auto [lo, hi] = capacity_bounds(cfg.geometry, elec, cfg.budget);
    const double mid =
        capacity_oam_simplified(cfg.geometry, elec, cfg.budget).total_bits;
    CHECK(lo <= mid);
    CHECK(mid <= hi);
    CHECK(lo > 0.0);
  }
}

TEST_CASE("bounds: the gap widens as the rings grow at a fixed difference") {
  SimulationConfig a = default_config();
  a.geometry.ring_radius_tx = 0.025;
  a.geometry.ring_radius_rx = 0.035;
  SimulationConfig b = a;
  b.geometry.ring_radius_tx = 0.030;
  b.geometry.ring_radius_rx = 0.040;
  const CoilElectrical elec = make_electrical(a);
  const auto [lo_a, hi_a] = capacity_bounds(a.geometry, elec, a.budget);
  const auto [lo_b, hi_b] = capacity_bounds(b.geometry, elec, b.budget);
  CHECK(rel_err(hi_b, hi_a) < 1e-12);  // same ring-radius difference
  CHECK(lo_b < lo_a);                  // farther kernel distance
}

TEST_CASE("estimation-path capacity equals the reduced path when aligned") {
  const SimulationConfig cfg = default_config();
  const ChannelMatrix ch = channel_for(cfg, true);
  const CapacityReport blind = capacity_oam(ch, cfg.budget);
  const CapacityReport ls = capacity_ls(ch, ch.h, cfg.budget);
  CHECK(rel_err(ls.total_bits, blind.total_bits) < 1e-9);
  CHECK(ls.scheme == CapacityScheme::oam_ls);

  CHECK(ber_ls(ch, ch.h, cfg.budget) >= 0.0);
  CHECK(ber_ls(ch, ch.h, cfg.budget) <= 0.5);

  // The estimation path also handles wide/tall channels without folding.
  SimulationConfig rect = cfg;
  rect.geometry.n_tx = 4;
  rect.geometry.n_rx = 6;
  const ChannelMatrix chr = channel_for(rect, true);
  const CapacityReport rep = capacity_ls(chr, chr.h, cfg.budget);
  CHECK(rep.per_mode_sinr.size() == 4);
  CHECK(rep.total_bits > 0.0);
}

TEST_CASE("single-coil baseline: endpoints and high-power slope") {
  const SimulationConfig cfg = default_config();
  const CoilElectrical elec = make_electrical(cfg);
  LinkBudget dark = cfg.budget;
  dark.total_tx_power = 0.0;
  CHECK(capacity_siso(cfg.geometry, elec, dark) == 0.0);

  LinkBudget quiet = cfg.budget;
  quiet.noise_power = cfg.budget.noise_power * 1e-12;
  LinkBudget quiet4 = quiet;
  quiet4.total_tx_power *= 4.0;
  const double c1 = capacity_siso(cfg.geometry, elec, quiet);
  const double c4 = capacity_siso(cfg.geometry, elec, quiet4);
  CHECK(c4 - c1 == doctest::Approx(2.0).epsilon(0.025));
}

TEST_CASE("default correlation matrices are physical") {
  const SimulationConfig cfg = default_config();
  for (const Eigen::MatrixXd& g : {default_correlation_tx(cfg.geometry),
                                   default_correlation_rx(cfg.geometry)}) {
    REQUIRE(g.rows() == 8);
    REQUIRE(g.cols() == 8);
    for (int i = 0; i < 8; ++i) CHECK(g(i, i) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK((g - g.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    CHECK(es.eigenvalues().minCoeff() > 0.9);
    CHECK(es.eigenvalues().maxCoeff() < 1.1);
  }
}

TEST_CASE("conventional-MIMO baseline: identity correlation closed form") {
  const SimulationConfig cfg = default_config();
  const ChannelMatrix ch = channel_for(cfg, true);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(8, 8);
  const double got = capacity_mimo(ch, cfg.budget, eye, eye);

  const Eigen::MatrixXcd gram = ch.h * ch.h.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
  double want = 0.0;
  const double scale =
      cfg.budget.total_tx_power / (cfg.budget.noise_power * 8.0);
  for (int i = 0; i < 8; ++i)
    want += std::log2(1.0 + scale * std::max(0.0, es.eigenvalues()(i)));
  CHECK(rel_err(got, want) < 1e-9);
}

TEST_CASE("fully correlated arrays collapse the MIMO capacity") {
  SimulationConfig cfg = default_config();
  cfg.geometry.n_tx = 2;
  cfg.geometry.n_rx = 2;
  const ChannelMatrix ch = channel_for(cfg, true);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd ones(2, 2);
  ones << 1.0, 1.0, 1.0, 1.0;

  // An all-ones correlation is rank one, so the effective channel carries a
  // single spatial mode whose gain is the full Frobenius energy.
  const Eigen::MatrixXcd collapsed = ones * ch.h * ones;
  const double power_scale =
      cfg.budget.total_tx_power / (cfg.budget.noise_power * 2.0);
  const double rank_one =
      std::log2(1.0 + power_scale * collapsed.squaredNorm());
  CHECK(capacity_mimo(ch, cfg.budget, ones, ones) ==
        doctest::Approx(rank_one).epsilon(1e-9));

  // At high SNR two independent modes beat one coherently combined mode.
  LinkBudget quiet = cfg.budget;
  quiet.noise_power *= 1e-8;
  CHECK(capacity_mimo(ch, quiet, ones, ones) <
        capacity_mimo(ch, quiet, eye, eye));

  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 1.5, 1.5, 1.0;
  CHECK_THROWS_AS(capacity_mimo(ch, cfg.budget, indefinite, eye),
                  std::invalid_argument);
  CHECK_THROWS_AS(capacity_mimo(ch, cfg.budget, eye, 2.0 * eye),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      capacity_mimo(ch, cfg.budget, Eigen::MatrixXd::Identity(3, 3), eye),
      std::invalid_argument);
}

TEST_CASE("water filling never loses to equal power") {
  const SimulationConfig cfg = default_config();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(4, 4);
  Rng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    ChannelMatrix ch;
    ch.h.resize(4, 4);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) ch.h(r, c) = complex_gaussian(rng, 1e-4);
    const double equal = capacity_mimo(ch, cfg.budget, eye, eye, false);
    const double wf = capacity_mimo(ch, cfg.budget, eye, eye, true);
    CHECK(wf >= equal - 1e-12);
  }
}

TEST_CASE("capacity-gap surface: degenerate point and infeasible points") {
  SimulationConfig base = default_config();
  const SweepResult tiny = capacity_gap_surface(base, 2);
  REQUIRE(tiny.axis_names.size() == 2);
  REQUIRE(tiny.value_names.size() == 3);
  CHECK(tiny.points.size() == 4);
  bool found_11 = false;
  for (const SweepPoint& p : tiny.points) {
    CHECK(p.skip_reason.empty());
    if (p.coords[0] == 1.0 && p.coords[1] == 1.0) {
      found_11 = true;
      CHECK(std::abs(p.values[2]) < 1e-9);  // single pair: no scheme gap
    }
  }
  CHECK(found_11);

  // 5 mm coils on a 15 mm ring fit at most 9 around the circle.
  SimulationConfig tight = base;
  tight.geometry.ring_radius_tx = 0.015;
  tight.geometry.ring_radius_rx = 0.015;
  const SweepResult surf = capacity_gap_surface(tight, 10);
  CHECK(surf.points.size() == 100);
  int skipped = 0;
  for (const SweepPoint& p : surf.points) {
    const bool infeasible = p.coords[0] == 10.0 || p.coords[1] == 10.0;
    if (infeasible) {
      ++skipped;
      CHECK(!p.skip_reason.empty());
      CHECK(std::isnan(p.values[2]));
    } else {
      CHECK(p.skip_reason.empty());
      CHECK(std::isfinite(p.values[0]));
      CHECK(std::isfinite(p.values[1]));
    }
  }
  CHECK(skipped == 19);
}
