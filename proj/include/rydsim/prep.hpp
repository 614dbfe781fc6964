#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace rydsim {

enum class RampShape { Constant, SinSquaredOn, SinSquaredOff, Linear };

// Field envelope in MHz. SinSquaredOn rises 0 -> amplitude over
// [t_start, t_end] and holds; SinSquaredOff holds amplitude before t_start and
// falls to 0 at t_end; Linear interpolates 0 -> amplitude over the ramp and
// holds. A zero-length ramp degenerates to a step at t_start.
struct PulseRamp {
  RampShape shape = RampShape::Constant;
  double t_start_us = 0.0;
  double t_end_us = 0.0;
  double amplitude_MHz = 0.0;

  double value(double t_us) const;
};

// Three-photon ladder g - e - r - r' in the rotating frame. Diagonal
// (0, -delta_e, -delta_r_sign * delta_r, -delta_3); couplings
// Omega_p/2 (g-e), Omega_c/2 (e-r), Omega_mw/2 (r-r'). With gamma_e > 0 a
// -i gamma_e/2 term is added to the e diagonal.
//
// Default pulse profile: probe and microwave share an identical envelope
// (sin^2 turn-on, flat, optional sin^2 turn-off at the end), which keeps the
// chain symmetric under g<->r', e<->r so the light shifts of g and r' cancel
// and the three-photon resonance stays pinned at zero detuning. The control
// field starts on and ramps off, and its area sets the transferred population.
struct PrepConfig {
  double delta_e_MHz = 100.0;
  double delta_r_MHz = 100.0;
  int delta_r_sign = +1;
  double three_photon_detuning_MHz = 0.0;
  double gamma_e_MHz = 0.0;
  double duration_us = 3.0;
  bool mw_rampdown = true;
  double rampdown_start_us = 2.55;
  PulseRamp probe_ramp{RampShape::SinSquaredOn, 0.0, 0.3, 30.0};
  PulseRamp control_ramp{RampShape::SinSquaredOff, 0.5, 2.55, 18.0};
  PulseRamp mw_ramp{RampShape::SinSquaredOn, 0.0, 0.3, 30.0};

  static PrepConfig defaults() { return {}; }
  void validate() const;

  double omega_p(double t_us) const;
  double omega_c(double t_us) const;
  double omega_mw(double t_us) const;
};

// Complex amplitudes over (g, e, r, r').
struct LevelState {
  std::array<std::complex<double>, 4> amp{{1.0, 0.0, 0.0, 0.0}};

  double norm() const;
  std::array<double, 4> populations() const;
};

using Hamiltonian4 = std::array<std::complex<double>, 16>;  // row-major 4x4

// Rotating-frame Hamiltonian in MHz at time t. Throws std::domain_error when
// t lies outside [0, duration].
Hamiltonian4 build_hamiltonian(const PrepConfig& cfg, double t_us);

struct EvolveResult {
  std::vector<double> t_us;
  std::vector<std::array<double, 4>> populations;
  LevelState final_state;
  std::array<double, 4> max_populations{};
  double final_norm = 0.0;
  // Step-doubling check: max change in final populations when dt is halved.
  double step_check_delta = 0.0;
  bool step_converged = true;
};

// Fixed-step RK4 integration of da/dt = -2 pi i H(t) a, H in MHz, t in us.
// When check_step is set the integration is repeated at dt/2 and flagged if
// final populations move by more than 1e-6.
EvolveResult evolve(const PrepConfig& cfg, double dt_us = 2e-4,
                    int sample_stride = 50, bool check_step = true);

struct ScanPoint {
  double detuning_MHz = 0.0;
  double p_rprime = 0.0;
  double p_r = 0.0;
  double p_e = 0.0;
};

struct ScanResult {
  std::vector<ScanPoint> points;
  double peak_MHz = 0.0;   // parabolic refinement around the maximum
  double fwhm_MHz = 0.0;   // linear interpolation at half maximum
  double peak_p_rprime = 0.0;
};

ScanResult scan_three_photon(const PrepConfig& cfg,
                             std::span<const double> detuning_grid_MHz,
                             double dt_us = 4e-4);

struct RampdownComparison {
  double p_r_with = 0.0;
  double p_r_without = 0.0;
  double p_rprime_with = 0.0;
  double p_rprime_without = 0.0;
};

// Residual population left in r at the end of the sequence with and without
// ramping the microwave down; ramping down lets the dressed state rotate into
// bare r' instead of projecting onto it.
RampdownComparison mw_rampdown_comparison(const PrepConfig& cfg,
                                          double dt_us = 2e-4);

}  // namespace rydsim
