#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "oracles.hpp"
#include "rydsim/qubit.hpp"
#include "rydsim/rng.hpp"

using namespace rydsim;

TEST_CASE("two-level rotation starts in up and nulls at the pi time") {
  RabiConfig cfg;
  CHECK(rabi_population(cfg, 0.0) == 1.0);
  const double t_pi = 1.0 / (2.0 * cfg.omega_MHz);
  CHECK(t_pi * 1000.0 == doctest::Approx(94.3396).epsilon(1e-4));
  CHECK(std::abs(t_pi * 1000.0 - 90.0) < 6.0);
  CHECK(rabi_population(cfg, t_pi) < 1e-12);
}

TEST_CASE("oscillation period equals the inverse Rabi frequency") {
  RabiConfig cfg;
  const double period = 1.0 / cfg.omega_MHz;
  for (double t : {0.05, 0.13, 0.61}) {
    CHECK(std::abs(rabi_population(cfg, t) - rabi_population(cfg, t + period)) <
          1e-9);
  }
}

TEST_CASE("spectator leakage stays below three percent and matches RK4") {
  RabiConfig cfg;
  cfg.include_spectator = true;
  double max_leak = 0.0;
  for (double t = 0.0; t <= 2.0; t += 0.004) {
    const ThreeLevelPops pops = rabi_populations3(cfg, t);
    CHECK(std::abs(pops.up + pops.down + pops.spectator - 1.0) < 1e-9);
    max_leak = std::max(max_leak, pops.spectator);
  }
  CHECK(max_leak < 0.03);
  CHECK(max_leak > 0.0);

  // Independent dense integration of the same constant Hamiltonian.
  const double o = 0.5 * cfg.omega_MHz;
  const double os = o / cfg.spectator_suppression;
  std::vector<std::complex<double>> h = {0.0, o,  0.0, o,   0.0, os,
                                         0.0, os, std::complex<double>(
                                                      -cfg.spectator_detuning_MHz)};
  for (double t : {0.07, 0.45, 1.2}) {
    const auto a = oracles::rk4_constant_h(h, 3, {1.0, 0.0, 0.0}, t, 2e-5);
    const ThreeLevelPops pops = rabi_populations3(cfg, t);
    CHECK(std::abs(pops.up - std::norm(a[0])) < 1e-6);
    CHECK(std::abs(pops.down - std::norm(a[1])) < 1e-6);
    CHECK(std::abs(pops.spectator - std::norm(a[2])) < 1e-6);
  }
}

TEST_CASE("measurement channel algebra") {
  const MeasurementChannel ideal{1.0, 1.0};
  for (double p : {0.0, 0.3, 1.0}) CHECK(apply_channel(ideal, p) == p);

  const MeasurementChannel ch{0.93, 0.92};
  CHECK(apply_channel(ch, 0.5) == doctest::Approx(0.5 * 0.93).epsilon(1e-15));
  CHECK(apply_channel(ch, 1.0) == doctest::Approx(0.8556).epsilon(1e-12));

  for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const InversionResult inv = invert_channel(ch, apply_channel(ch, p));
    CHECK(inv.in_range);
    CHECK(std::abs(inv.p - p) < 1e-12);
  }
  CHECK(invert_channel(ch, 0.93 * 0.92).p == doctest::Approx(1.0));
  const InversionResult low = invert_channel(ch, 0.0);
  CHECK(!low.in_range);
  CHECK(low.p == 0.0);

  const MeasurementChannel flat{0.93, 0.5};
  CHECK_THROWS_AS(invert_channel(flat, 0.4), std::domain_error);
}

TEST_CASE("ramsey analytic contrast follows the Gaussian decay") {
  const RamseyConfig cfg = RamseyConfig::defaults();
  CHECK(ramsey_analytic_contrast(cfg, 0.0) == cfg.amplitude);
  CHECK(ramsey_analytic_contrast(cfg, cfg.t2_star_us) ==
        doctest::Approx(cfg.amplitude / std::exp(1.0)));
  // sigma = sqrt(2)/T2* makes exp(-sigma^2 tau^2 / 2) = exp(-(tau/T2*)^2).
  const double sigma = cfg.detuning_sigma_rad_per_us();
  CHECK(sigma * sigma / 2.0 == doctest::Approx(1.0 / (cfg.t2_star_us * cfg.t2_star_us)));
}

TEST_CASE("an arbitrarily slow dephasing keeps full contrast") {
  RamseyConfig cfg = RamseyConfig::defaults();
  cfg.t2_star_us = 1e9;
  for (double tau : {1.0, 10.0, 20.0})
    CHECK(ramsey_analytic_contrast(cfg, tau) == doctest::Approx(cfg.amplitude));
}

TEST_CASE("sampled ramsey fractions agree with the analytic mean everywhere") {
  const RamseyConfig cfg = RamseyConfig::defaults();
  const int shots = 10000;
  int idx = 0;
  for (double tau : {0.0, 2.0, 6.0, 10.0, 15.0, 20.0}) {
    for (double phase : {0.0, 1.0, 2.5}) {
      const double f =
          ramsey_signal(cfg, tau, phase, shots, seed_derive(3, "rs", idx++));
      const double mean = ramsey_analytic_mean(cfg, tau, phase);
      CHECK(std::abs(f - mean) < 3.0 * oracles::binomial_se(mean, shots));
    }
  }
}

TEST_CASE("sampled fringe contrast matches the analytic envelope") {
  const RamseyConfig cfg = RamseyConfig::defaults();
  int idx = 0;
  for (double tau : {0.0, 6.0, 12.0, 18.0}) {
    const double c = estimate_fringe_contrast(cfg, tau, 10000, seed_derive(9, "fc", idx++));
    CHECK(std::abs(c - ramsey_analytic_contrast(cfg, tau)) < 0.02);
  }
}

TEST_CASE("noiseless rabi fit recovers frequency and a negligible contrast loss") {
  const MeasurementChannel ch{0.93, 0.92};
  RabiConfig rc;
  std::vector<std::pair<double, double>> data;
  for (int i = 0; i < 32; ++i) {
    const double t = i * (0.75 / 31.0);  // four periods
    data.emplace_back(t, apply_channel(ch, rabi_population(rc, t)));
  }
  const RabiFitResult fit = fit_rabi(data, ch);
  CHECK(fit.converged);
  CHECK(std::abs(fit.omega_MHz - 5.3) < 0.005);
  CHECK(fit.contrast_loss_per_2pi <= 1e-3);
}

TEST_CASE("noisy rabi fit recovers the frequency within 0.05 MHz") {
  const MeasurementChannel ch{0.93, 0.92};
  RabiConfig rc;
  Rng rng(0x600dULL);
  std::vector<std::pair<double, double>> data;
  const int reps = 150;
  for (int i = 0; i < 40; ++i) {
    const double t = i * (0.75 / 39.0);
    const double ptilde = apply_channel(ch, rabi_population(rc, t));
    long ups = 0;
    for (int s = 0; s < reps; ++s)
      if (rng.uniform() < ptilde) ++ups;
    data.emplace_back(t, static_cast<double>(ups) / reps);
  }
  const RabiFitResult fit = fit_rabi(data, ch);
  CHECK(std::abs(fit.omega_MHz - 5.3) < 0.05);
}

TEST_CASE("reference rescaling removes a slow drift without moving the frequency") {
  const MeasurementChannel ch{0.93, 0.92};
  RabiConfig rc;
  std::vector<std::pair<double, double>> clean, drifted;
  for (int i = 0; i < 36; ++i) {
    const double t = i * (0.75 / 35.0);
    const double ptilde = apply_channel(ch, rabi_population(rc, t));
    // Multiplicative drift, tracked by the two per-point references.
    const double drift = 1.0 + 0.08 * std::sin(0.9 * t);
    const double ref_full = apply_channel(ch, 1.0) * drift;
    const double ref_empty = apply_channel(ch, 0.0) * drift;
    clean.emplace_back(t, ptilde);
    drifted.emplace_back(
        t, rescale_with_references(ptilde * drift, ref_full, ref_empty, ch));
  }
  const RabiFitResult a = fit_rabi(clean, ch);
  const RabiFitResult b = fit_rabi(drifted, ch);
  CHECK(std::abs(a.omega_MHz - b.omega_MHz) < 1e-9);
}

TEST_CASE("rabi fit preconditions") {
  const MeasurementChannel ch{0.93, 0.92};
  std::vector<std::pair<double, double>> few = {{0.0, 0.8}, {0.1, 0.2}};
  CHECK_THROWS_AS(fit_rabi(few, ch), std::invalid_argument);

  // Many points but less than two periods.
  RabiConfig rc;
  std::vector<std::pair<double, double>> narrow;
  for (int i = 0; i < 16; ++i) {
    const double t = i * (0.12 / 15.0);
    narrow.emplace_back(t, apply_channel(ch, rabi_population(rc, t)));
  }
  CHECK_THROWS_AS(fit_rabi(narrow, ch), std::invalid_argument);
}

TEST_CASE("ramsey pipeline recovers amplitude and dephasing time") {
  const RamseyConfig cfg = RamseyConfig::defaults();
  std::vector<ContrastPoint> pts;
  int idx = 0;
  for (double tau : {1.0, 3.0, 6.0, 9.0, 12.0, 15.0, 18.0, 21.0})
    pts.push_back(
        {tau, estimate_fringe_contrast(cfg, tau, 400, seed_derive(21, "tau", idx++))});
  const RamseyFitResult fit = fit_ramsey(pts);
  CHECK(fit.converged);
  CHECK(std::abs(fit.t2_star_us - 15.0) <= 1.5);
  CHECK(std::abs(fit.amplitude - 0.88) <= 0.03);
}

TEST_CASE("ramsey fit flags decay-free data") {
  std::vector<ContrastPoint> flat;
  for (double tau : {1.0, 3.0, 5.0, 7.0, 9.0, 11.0}) flat.push_back({tau, 0.87});
  const RamseyFitResult fit = fit_ramsey(flat);
  CHECK(fit.flag == "no_decay");
  CHECK(fit.t2_star_us > 10.0 * 11.0);
  CHECK_THROWS_AS(fit_ramsey(std::vector<ContrastPoint>{{0.0, 0.9}}),
                  std::invalid_argument);
}

TEST_CASE("zeeman splittings at the bias field match the level structure") {
  const ZeemanSplittings z = zeeman_splittings(9.0);
  CHECK(z.p32_MHz == doctest::Approx(16.795).epsilon(1e-3));
  CHECK(z.s12_MHz == doctest::Approx(25.193).epsilon(1e-3));
  CHECK(std::abs(z.p32_MHz - 17.0) < 0.5);
  CHECK(std::abs(z.s12_MHz - 25.0) < 0.5);

  const ZeemanSplittings zero = zeeman_splittings(0.0);
  CHECK(zero.p32_MHz == 0.0);
  CHECK(zero.s12_MHz == 0.0);

  const ZeemanSplittings twice = zeeman_splittings(18.0);
  CHECK(twice.p32_MHz == doctest::Approx(2.0 * z.p32_MHz));
  CHECK(twice.s12_MHz == doctest::Approx(2.0 * z.s12_MHz));
}

TEST_CASE("two-excitation contrast decays on the interaction timescale") {
  const CloudGeometry geom = CloudGeometry::defaults();
  std::vector<double> grid;
  for (double t = 0.0; t <= 0.5 + 1e-12; t += 0.005) grid.push_back(t);

  for (Branch b : {Branch::Plus, Branch::Minus}) {
    const PairModel model = PairModel::detection(b);
    const double v0 = std::abs(pair_potential(model, rms_pair_distance(geom)));
    const double timescale_ns = 1000.0 / v0;
    CHECK(timescale_ns >= 17.0);
    CHECK(timescale_ns <= 46.0);

    const WashoutCurve curve =
        two_excitation_contrast(model, geom, 5.3, grid, 20000, 0xf00dULL);
    CHECK(curve.envelope.front() == doctest::Approx(1.0));
    bool collapsed = false;
    for (double c : curve.envelope) collapsed |= c <= 0.5;
    CHECK(collapsed);
  }
}

TEST_CASE("two-excitation contrast is flat for a vanishing interaction") {
  const CloudGeometry geom = CloudGeometry::defaults();
  PairModel feeble = PairModel::preparation();
  feeble.c6_parallel_MHz_um6 = 1e-30;
  const std::vector<double> grid = {0.0, 0.1, 0.3, 0.5};
  const WashoutCurve curve =
      two_excitation_contrast(feeble, geom, 5.3, grid, 2000, 1);
  for (double c : curve.envelope) CHECK(c == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("two-excitation contrast is invariant under V -> aV, t -> t/a") {
  const CloudGeometry geom = CloudGeometry::defaults();
  const PairModel base = PairModel::detection(Branch::Plus);
  PairModel scaled = base;
  const double a = 4.0;
  scaled.c6_parallel_MHz_um6 *= a;
  scaled.c3_MHz_um3 *= a;
  const std::vector<double> grid = {0.0, 0.04, 0.12, 0.2};
  std::vector<double> shrunk;
  for (double t : grid) shrunk.push_back(t / a);
  const WashoutCurve c1 = two_excitation_contrast(base, geom, 5.3, grid, 5000, 42);
  const WashoutCurve c2 =
      two_excitation_contrast(scaled, geom, 5.3, shrunk, 5000, 42);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(c1.envelope[i] - c2.envelope[i]) < 1e-12);
}
