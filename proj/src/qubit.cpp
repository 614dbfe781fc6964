#include "rydsim/qubit.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "rydsim/constants.hpp"
#include "rydsim/estimate.hpp"
#include "rydsim/rng.hpp"

namespace rydsim {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void RabiConfig::validate() const {
  if (!(omega_MHz > 0.0)) throw std::invalid_argument("RabiConfig: omega must be > 0");
  if (spectator_suppression < 1.0)
    throw std::invalid_argument("RabiConfig: suppression must be >= 1");
}

double rabi_population(const RabiConfig& cfg, double t_us) {
  cfg.validate();
  if (t_us < 0.0) throw std::domain_error("rabi_population: t must be >= 0");
  if (cfg.include_spectator) return rabi_populations3(cfg, t_us).up;
  const double c = std::cos(std::numbers::pi * cfg.omega_MHz * t_us);
  return c * c;
}

namespace {

// Jacobi eigendecomposition of a real symmetric 3x3 matrix.
void jacobi3(double a[3][3], double eigval[3], double eigvec[3][3]) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) eigvec[i][j] = i == j ? 1.0 : 0.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = std::abs(a[0][1]) + std::abs(a[0][2]) + std::abs(a[1][2]);
    if (off < 1e-15) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (std::abs(a[p][q]) < 1e-18) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 3; ++k) {
          const double vkp = eigvec[k][p], vkq = eigvec[k][q];
          eigvec[k][p] = c * vkp - s * vkq;
          eigvec[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  for (int i = 0; i < 3; ++i) eigval[i] = a[i][i];
}

}  // namespace

ThreeLevelPops rabi_populations3(const RabiConfig& cfg, double t_us) {
  cfg.validate();
  if (t_us < 0.0) throw std::domain_error("rabi_populations3: t must be >= 0");
  const double o = 0.5 * cfg.omega_MHz;
  const double os = 0.5 * cfg.omega_MHz / cfg.spectator_suppression;
  double h[3][3] = {{0.0, o, 0.0}, {o, 0.0, os}, {0.0, os, -cfg.spectator_detuning_MHz}};
  double ev[3];
  double v[3][3];
  jacobi3(h, ev, v);
  // a(t) = V exp(-2 pi i L t) V^T a0, a0 = (1, 0, 0).
  std::complex<double> amp[3] = {0.0, 0.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    const std::complex<double> phase =
        std::exp(std::complex<double>(0.0, -kTwoPi * ev[k] * t_us));
    for (int i = 0; i < 3; ++i) amp[i] += v[i][k] * phase * v[0][k];
  }
  return {std::norm(amp[0]), std::norm(amp[1]), std::norm(amp[2])};
}

double apply_channel(const MeasurementChannel& ch, double p) {
  if (p < 0.0 || p > 1.0) throw std::domain_error("apply_channel: p in [0, 1]");
  return ch.f_prep * ((1.0 - ch.f_det) + (2.0 * ch.f_det - 1.0) * p);
}

InversionResult invert_channel(const MeasurementChannel& ch, double p_tilde) {
  if (!(ch.f_det > 0.5))
    throw std::domain_error("invert_channel: requires f_det > 0.5");
  if (!(ch.f_prep > 0.0))
    throw std::domain_error("invert_channel: requires f_prep > 0");
  InversionResult res;
  const double p = (p_tilde / ch.f_prep - (1.0 - ch.f_det)) / (2.0 * ch.f_det - 1.0);
  res.in_range = p >= -1e-12 && p <= 1.0 + 1e-12;
  res.p = std::clamp(p, 0.0, 1.0);
  return res;
}

RamseyConfig RamseyConfig::defaults() {
  RamseyConfig cfg;
  cfg.t2_star_us = constants::kRamseyT2StarUs;
  cfg.amplitude = constants::kRamseyAmplitude;
  cfg.phase_grid_rad.resize(12);
  for (int i = 0; i < 12; ++i) cfg.phase_grid_rad[i] = kTwoPi * i / 12.0;
  return cfg;
}

void RamseyConfig::validate() const {
  if (!(t2_star_us > 0.0)) throw std::invalid_argument("RamseyConfig: t2_star > 0");
  if (!(amplitude >= 0.0 && amplitude <= 1.0))
    throw std::invalid_argument("RamseyConfig: amplitude in [0, 1]");
}

double RamseyConfig::detuning_sigma_rad_per_us() const {
  return std::numbers::sqrt2 / t2_star_us;
}

double ramsey_signal(const RamseyConfig& cfg, double tau_us, double phase_rad,
                     int n_shots, std::uint64_t seed) {
  cfg.validate();
  if (tau_us < 0.0) throw std::domain_error("ramsey_signal: tau must be >= 0");
  if (n_shots < 1) throw std::invalid_argument("ramsey_signal: n_shots >= 1");
  Rng rng(seed);
  const double sigma = cfg.detuning_sigma_rad_per_us();
  long ups = 0;
  for (int i = 0; i < n_shots; ++i) {
    const double delta = sigma * rng.normal();
    const double p = 0.5 * (1.0 + cfg.amplitude * std::cos(delta * tau_us + phase_rad));
    if (rng.uniform() < p) ++ups;
  }
  return static_cast<double>(ups) / n_shots;
}

double ramsey_analytic_mean(const RamseyConfig& cfg, double tau_us, double phase_rad) {
  return 0.5 * (1.0 + ramsey_analytic_contrast(cfg, tau_us) * std::cos(phase_rad));
}

double ramsey_analytic_contrast(const RamseyConfig& cfg, double tau_us) {
  const double x = tau_us / cfg.t2_star_us;
  return cfg.amplitude * std::exp(-x * x);
}

double estimate_fringe_contrast(const RamseyConfig& cfg, double tau_us, int n_shots,
                                std::uint64_t seed) {
  const auto& phases = cfg.phase_grid_rad;
  if (phases.size() < 4)
    throw std::invalid_argument("estimate_fringe_contrast: need >= 4 phases");
  double a = 0.0, b = 0.0;
  for (std::size_t j = 0; j < phases.size(); ++j) {
    const double f = ramsey_signal(cfg, tau_us, phases[j], n_shots,
                                   seed_derive(seed, "fringe-phase", j));
    a += f * std::cos(phases[j]);
    b += f * std::sin(phases[j]);
  }
  a *= 2.0 / phases.size();
  b *= 2.0 / phases.size();
  return 2.0 * std::sqrt(a * a + b * b);
}

RabiFitResult fit_rabi(std::span<const std::pair<double, double>> data_t_ptilde,
                       const MeasurementChannel& ch) {
  if (data_t_ptilde.size() < 8)
    throw std::invalid_argument("fit_rabi: need >= 8 points");

  std::vector<std::pair<double, double>> corrected;
  corrected.reserve(data_t_ptilde.size());
  for (const auto& [t, ptilde] : data_t_ptilde)
    corrected.emplace_back(t, invert_channel(ch, ptilde).p);

  // Frequency init from sign changes of p - 1/2; each oscillation period
  // crosses twice.
  int crossings = 0;
  for (std::size_t i = 1; i < corrected.size(); ++i)
    if ((corrected[i].second - 0.5) * (corrected[i - 1].second - 0.5) < 0.0)
      ++crossings;
  const double t_span = corrected.back().first - corrected.front().first;
  if (crossings < 4 || !(t_span > 0.0))
    throw std::invalid_argument("fit_rabi: data must span >= 2 periods");
  const double omega0 = crossings / (2.0 * t_span);

  // p(t) = 1/2 (1 + C0 (1 - dC)^{Omega t} cos(2 pi Omega t)).
  auto model = [](std::span<const double> x, double t) {
    const double omega = x[0], c0 = x[1], d_c = x[2];
    return 0.5 * (1.0 + c0 * std::exp(std::log1p(-d_c) * omega * t) *
                            std::cos(kTwoPi * omega * t));
  };
  // The frequency is boxed around the crossing-count estimate; without the
  // box, discrete sampling lets aliased frequencies fit noisy data equally
  // well.
  std::vector<ParamBound> bounds = {
      ParamBound{omega0 / 3.0, 3.0 * omega0, Transform::Logit},
      ParamBound{0.0, 1.05, Transform::Logit},   // C0
      ParamBound{0.0, 0.5, Transform::Logit},    // dC
  };
  const double x0[3] = {omega0, 0.95, 1e-4};
  FitResult fit = least_squares_fit(model, corrected, x0, bounds, /*restarts=*/6,
                                    /*tol=*/1e-12);
  return {fit.point[0], fit.point[2], fit.point[1], fit.converged};
}

RamseyFitResult fit_ramsey(std::span<const ContrastPoint> data) {
  if (data.size() < 5) throw std::invalid_argument("fit_ramsey: need >= 5 points");
  std::vector<std::pair<double, double>> pts;
  double max_tau = 0.0, max_c = 0.0;
  for (const auto& d : data) {
    pts.emplace_back(d.tau_us, d.contrast);
    max_tau = std::max(max_tau, d.tau_us);
    max_c = std::max(max_c, d.contrast);
  }
  auto model = [](std::span<const double> x, double tau) {
    const double r = tau / x[1];
    return x[0] * std::exp(-r * r);
  };
  std::vector<ParamBound> bounds = {
      ParamBound{0.0, 1.5, Transform::Logit},  // amplitude
      ParamBound{0.0, 0.0, Transform::Log},    // t2*
  };
  const double x0[2] = {std::clamp(max_c, 0.05, 1.4), std::max(0.5 * max_tau, 1e-3)};
  FitResult fit = least_squares_fit(model, pts, x0, bounds, /*restarts=*/6,
                                    /*tol=*/1e-12);
  RamseyFitResult res{fit.point[0], fit.point[1], fit.converged, ""};
  if (res.t2_star_us > 10.0 * max_tau) res.flag = "no_decay";
  return res;
}

double rescale_with_references(double p_tilde_observed, double ref_full,
                               double ref_empty, const MeasurementChannel& ch) {
  const double nominal_full = apply_channel(ch, 1.0);
  const double nominal_empty = apply_channel(ch, 0.0);
  if (std::abs(ref_full - ref_empty) < 1e-12)
    throw std::domain_error("rescale_with_references: degenerate references");
  return nominal_empty + (p_tilde_observed - ref_empty) *
                             (nominal_full - nominal_empty) / (ref_full - ref_empty);
}

ZeemanSplittings zeeman_splittings(double b_gauss) {
  if (b_gauss < 0.0) throw std::domain_error("zeeman_splittings: B must be >= 0");
  const double mu_b = constants::kBohrMagnetonMHzPerGauss;
  return {4.0 / 3.0 * mu_b * b_gauss, 2.0 * mu_b * b_gauss};
}

WashoutCurve two_excitation_contrast(const PairModel& model,
                                     const CloudGeometry& geom, double omega_MHz,
                                     std::span<const double> t_grid_us, int n_pairs,
                                     std::uint64_t seed) {
  model.validate();
  geom.validate();
  if (n_pairs < 1000)
    throw std::invalid_argument("two_excitation_contrast: n_pairs >= 1000");

  const Vec3 axis = probe_direction(geom);
  Rng rng(seed);
  std::vector<double> shifts;  // V(R, theta) per sampled pair, MHz
  shifts.reserve(n_pairs);
  for (int i = 0; i < n_pairs; ++i) {
    const double dx = geom.sigma_x_um * (rng.normal() - rng.normal());
    const double dy = geom.sigma_y_um * (rng.normal() - rng.normal());
    const double dz = geom.sigma_z_um * (rng.normal() - rng.normal());
    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (r <= 1e-9) {
      shifts.push_back(0.0);
      continue;
    }
    const double cos_theta = (dx * axis.x + dy * axis.y + dz * axis.z) / r;
    const double theta = std::acos(std::clamp(cos_theta, -1.0, 1.0));
    shifts.push_back(pair_potential(model, r, theta));
  }

  WashoutCurve curve;
  curve.t_us.assign(t_grid_us.begin(), t_grid_us.end());
  curve.envelope.reserve(t_grid_us.size());
  curve.signal.reserve(t_grid_us.size());
  for (double t : t_grid_us) {
    std::complex<double> acc(0.0, 0.0);
    for (double v : shifts)
      acc += std::exp(std::complex<double>(0.0, kTwoPi * v * t));
    acc /= static_cast<double>(shifts.size());
    curve.envelope.push_back(std::abs(acc));
    const std::complex<double> carrier =
        std::exp(std::complex<double>(0.0, kTwoPi * omega_MHz * t));
    curve.signal.push_back(0.5 * (1.0 + (carrier * acc).real()));
  }
  return curve;
}

}  // namespace rydsim
