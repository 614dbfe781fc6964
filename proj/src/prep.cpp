#include "rydsim/prep.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace rydsim {

namespace {

using Cx = std::complex<double>;
using State = std::array<Cx, 4>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sin2_rise(double x) {
  const double s = std::sin(0.5 * std::numbers::pi * x);
  return s * s;
}

}  // namespace

double PulseRamp::value(double t_us) const {
  switch (shape) {
    case RampShape::Constant:
      return amplitude_MHz;
    case RampShape::SinSquaredOn:
      if (t_us <= t_start_us) return t_end_us <= t_start_us ? amplitude_MHz : 0.0;
      if (t_us >= t_end_us) return amplitude_MHz;
      return amplitude_MHz * sin2_rise((t_us - t_start_us) / (t_end_us - t_start_us));
    case RampShape::SinSquaredOff:
      if (t_us <= t_start_us) return amplitude_MHz;
      if (t_us >= t_end_us) return 0.0;
      return amplitude_MHz *
             (1.0 - sin2_rise((t_us - t_start_us) / (t_end_us - t_start_us)));
    case RampShape::Linear:
      if (t_us <= t_start_us) return t_end_us <= t_start_us ? amplitude_MHz : 0.0;
      if (t_us >= t_end_us) return amplitude_MHz;
      return amplitude_MHz * (t_us - t_start_us) / (t_end_us - t_start_us);
  }
  return 0.0;
}

void PrepConfig::validate() const {
  if (!(duration_us > 0.0))
    throw std::invalid_argument("PrepConfig: duration must be > 0");
  if (gamma_e_MHz < 0.0)
    throw std::invalid_argument("PrepConfig: gamma_e must be >= 0");
  for (const PulseRamp* r : {&probe_ramp, &control_ramp, &mw_ramp}) {
    if (r->amplitude_MHz < 0.0)
      throw std::invalid_argument("PrepConfig: ramp amplitudes must be >= 0");
    if (r->t_start_us > r->t_end_us)
      throw std::invalid_argument("PrepConfig: ramp start must be <= end");
  }
  if (delta_r_sign != 1 && delta_r_sign != -1)
    throw std::invalid_argument("PrepConfig: delta_r_sign must be +/-1");
}

namespace {

// Shared turn-off envelope applied to the probe and microwave when
// mw_rampdown is enabled; identical envelopes keep the chain symmetric.
double rampdown_factor(const PrepConfig& cfg, double t_us) {
  if (!cfg.mw_rampdown) return 1.0;
  const double t0 = cfg.rampdown_start_us;
  const double t1 = cfg.duration_us;
  if (t1 <= t0) return 1.0;  // zero-length ramp-down degenerates to none
  if (t_us <= t0) return 1.0;
  if (t_us >= t1) return 0.0;
  return 1.0 - sin2_rise((t_us - t0) / (t1 - t0));
}

}  // namespace

double PrepConfig::omega_p(double t_us) const {
  return probe_ramp.value(t_us) * rampdown_factor(*this, t_us);
}

double PrepConfig::omega_c(double t_us) const { return control_ramp.value(t_us); }

double PrepConfig::omega_mw(double t_us) const {
  return mw_ramp.value(t_us) * rampdown_factor(*this, t_us);
}

double LevelState::norm() const {
  double n = 0.0;
  for (const auto& a : amp) n += std::norm(a);
  return n;
}

std::array<double, 4> LevelState::populations() const {
  return {std::norm(amp[0]), std::norm(amp[1]), std::norm(amp[2]), std::norm(amp[3])};
}

Hamiltonian4 build_hamiltonian(const PrepConfig& cfg, double t_us) {
  cfg.validate();
  if (t_us < 0.0 || t_us > cfg.duration_us)
    throw std::domain_error("build_hamiltonian: t outside [0, duration]");
  Hamiltonian4 h{};
  const double op = 0.5 * cfg.omega_p(t_us);
  const double oc = 0.5 * cfg.omega_c(t_us);
  const double om = 0.5 * cfg.omega_mw(t_us);
  h[0 * 4 + 0] = 0.0;
  h[1 * 4 + 1] = Cx(-cfg.delta_e_MHz, -0.5 * cfg.gamma_e_MHz);
  h[2 * 4 + 2] = -cfg.delta_r_sign * cfg.delta_r_MHz;
  h[3 * 4 + 3] = -cfg.three_photon_detuning_MHz;
  h[0 * 4 + 1] = h[1 * 4 + 0] = op;
  h[1 * 4 + 2] = h[2 * 4 + 1] = oc;
  h[2 * 4 + 3] = h[3 * 4 + 2] = om;
  return h;
}

namespace {

// Right-hand side of da/dt = -2 pi i H(t) a, with the tridiagonal structure
// written out (the Hamiltonian is a coupled chain).
inline void deriv(const PrepConfig& cfg, double t, const State& a, State& out) {
  const double op = 0.5 * cfg.omega_p(t);
  const double oc = 0.5 * cfg.omega_c(t);
  const double om = 0.5 * cfg.omega_mw(t);
  const Cx de(-cfg.delta_e_MHz, -0.5 * cfg.gamma_e_MHz);
  const double dr = -cfg.delta_r_sign * cfg.delta_r_MHz;
  const double d3 = -cfg.three_photon_detuning_MHz;
  const Cx m2pi_i(0.0, -kTwoPi);
  out[0] = m2pi_i * (op * a[1]);
  out[1] = m2pi_i * (op * a[0] + de * a[1] + oc * a[2]);
  out[2] = m2pi_i * (oc * a[1] + dr * a[2] + om * a[3]);
  out[3] = m2pi_i * (om * a[2] + d3 * a[3]);
}

State rk4_run(const PrepConfig& cfg, double dt, long n_steps,
              const std::function<void(long, double, const State&)>& on_sample) {
  State a{Cx(1.0), Cx(0.0), Cx(0.0), Cx(0.0)};
  State k1, k2, k3, k4, tmp;
  double t = 0.0;
  if (on_sample) on_sample(0, 0.0, a);
  for (long i = 0; i < n_steps; ++i) {
    deriv(cfg, t, a, k1);
    for (int j = 0; j < 4; ++j) tmp[j] = a[j] + 0.5 * dt * k1[j];
    deriv(cfg, t + 0.5 * dt, tmp, k2);
    for (int j = 0; j < 4; ++j) tmp[j] = a[j] + 0.5 * dt * k2[j];
    deriv(cfg, t + 0.5 * dt, tmp, k3);
    for (int j = 0; j < 4; ++j) tmp[j] = a[j] + dt * k3[j];
    deriv(cfg, t + dt, tmp, k4);
    for (int j = 0; j < 4; ++j)
      a[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    t += dt;
    if (on_sample) on_sample(i + 1, t, a);
  }
  return a;
}

}  // namespace

EvolveResult evolve(const PrepConfig& cfg, double dt_us, int sample_stride,
                    bool check_step) {
  cfg.validate();
  if (!(dt_us > 0.0)) throw std::invalid_argument("evolve: dt must be > 0");
  const long n_steps = std::lround(std::ceil(cfg.duration_us / dt_us - 1e-12));
  const double dt = cfg.duration_us / n_steps;

  EvolveResult res;
  res.max_populations = {0.0, 0.0, 0.0, 0.0};
  auto sampler = [&](long step, double t, const State& a) {
    std::array<double, 4> pops{std::norm(a[0]), std::norm(a[1]), std::norm(a[2]),
                               std::norm(a[3])};
    for (int j = 0; j < 4; ++j)
      res.max_populations[j] = std::max(res.max_populations[j], pops[j]);
    if (step % sample_stride == 0 || step == n_steps) {
      res.t_us.push_back(t);
      res.populations.push_back(pops);
    }
  };
  State final = rk4_run(cfg, dt, n_steps, sampler);
  res.final_state.amp = final;
  res.final_norm = res.final_state.norm();

  if (check_step) {
    State refined = rk4_run(cfg, 0.5 * dt, 2 * n_steps, nullptr);
    double delta = 0.0;
    for (int j = 0; j < 4; ++j)
      delta = std::max(delta, std::abs(std::norm(refined[j]) - std::norm(final[j])));
    res.step_check_delta = delta;
    res.step_converged = delta < 1e-6;
  }
  return res;
}

ScanResult scan_three_photon(const PrepConfig& cfg,
                             std::span<const double> detuning_grid_MHz,
                             double dt_us) {
  if (detuning_grid_MHz.empty())
    throw std::invalid_argument("scan_three_photon: empty grid");
  ScanResult out;
  out.points.reserve(detuning_grid_MHz.size());
  for (double d : detuning_grid_MHz) {
    PrepConfig c = cfg;
    c.three_photon_detuning_MHz = d;
    EvolveResult r = evolve(c, dt_us, 1 << 30, /*check_step=*/false);
    auto pops = r.final_state.populations();
    out.points.push_back({d, pops[3], pops[2], pops[1]});
  }

  std::size_t imax = 0;
  for (std::size_t i = 1; i < out.points.size(); ++i)
    if (out.points[i].p_rprime > out.points[imax].p_rprime) imax = i;
  out.peak_p_rprime = out.points[imax].p_rprime;
  out.peak_MHz = out.points[imax].detuning_MHz;
  if (imax > 0 && imax + 1 < out.points.size()) {
    // Parabolic refinement on the three points around the maximum
    // (uniform grid assumed).
    const double x1 = out.points[imax].detuning_MHz;
    const double h = out.points[imax + 1].detuning_MHz - x1;
    const double y0 = out.points[imax - 1].p_rprime;
    const double y1 = out.points[imax].p_rprime;
    const double y2 = out.points[imax + 1].p_rprime;
    const double denom = y0 - 2.0 * y1 + y2;
    if (std::abs(denom) > 1e-15)
      out.peak_MHz = x1 + 0.5 * h * (y0 - y2) / denom;
  }

  // FWHM by linear interpolation at half maximum on both sides of the peak.
  const double half = 0.5 * out.peak_p_rprime;
  double left = out.points.front().detuning_MHz;
  double right = out.points.back().detuning_MHz;
  for (std::size_t i = imax; i-- > 0;) {
    if (out.points[i].p_rprime < half) {
      const double x0 = out.points[i].detuning_MHz;
      const double x1 = out.points[i + 1].detuning_MHz;
      const double y0 = out.points[i].p_rprime;
      const double y1 = out.points[i + 1].p_rprime;
      left = x0 + (half - y0) / (y1 - y0) * (x1 - x0);
      break;
    }
  }
  for (std::size_t i = imax + 1; i < out.points.size(); ++i) {
    if (out.points[i].p_rprime < half) {
      const double x0 = out.points[i - 1].detuning_MHz;
      const double x1 = out.points[i].detuning_MHz;
      const double y0 = out.points[i - 1].p_rprime;
      const double y1 = out.points[i].p_rprime;
      right = x0 + (y0 - half) / (y0 - y1) * (x1 - x0);
      break;
    }
  }
  out.fwhm_MHz = right - left;
  return out;
}

RampdownComparison mw_rampdown_comparison(const PrepConfig& cfg, double dt_us) {
  RampdownComparison cmp;
  PrepConfig with = cfg;
  with.mw_rampdown = true;
  PrepConfig without = cfg;
  without.mw_rampdown = false;
  auto pw = evolve(with, dt_us, 1 << 30, false).final_state.populations();
  auto po = evolve(without, dt_us, 1 << 30, false).final_state.populations();
  cmp.p_r_with = pw[2];
  cmp.p_rprime_with = pw[3];
  cmp.p_r_without = po[2];
  cmp.p_rprime_without = po[3];
  return cmp;
}

}  // namespace rydsim
