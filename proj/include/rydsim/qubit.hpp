#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rydsim/ensemble.hpp"
#include "rydsim/interactions.hpp"

namespace rydsim {

// Microwave rotation between up (r') and down (r), with an optional spectator
// Zeeman level coupled to down at the configured detuning, its amplitude
// suppressed by the two-antenna cancellation factor.
struct RabiConfig {
  double omega_MHz = 5.3;
  double mw_frequency_MHz = 4814.2;  // carrier, metadata only
  double spectator_detuning_MHz = 17.0;
  double spectator_suppression = 10.0;
  bool include_spectator = false;
  int n_repetitions = 150;

  void validate() const;
};

// P(up) at time t for a qubit starting in up. Two-level: cos^2(pi Omega t).
double rabi_population(const RabiConfig& cfg, double t_us);

// Populations (up, down, spectator) from exact evolution of the constant
// three-level Hamiltonian (used when include_spectator is set).
struct ThreeLevelPops {
  double up = 0.0;
  double down = 0.0;
  double spectator = 0.0;
};
ThreeLevelPops rabi_populations3(const RabiConfig& cfg, double t_us);

// Measured up-probability as a function of the true one:
// p~ = F_p [(1 - F_d) + (2 F_d - 1) p].
struct MeasurementChannel {
  double f_prep = 0.93;
  double f_det = 0.92;
};

double apply_channel(const MeasurementChannel& ch, double p);

struct InversionResult {
  double p = 0.0;
  bool in_range = true;  // false when p~ fell outside [F_p(1-F_d), F_p F_d]
};

// Inverse of apply_channel, clamped to [0, 1] with an out-of-range flag.
// Requires f_det > 0.5.
InversionResult invert_channel(const MeasurementChannel& ch, double p_tilde);

// Ramsey dephasing model: a static detuning drawn per shot from a normal
// distribution of width sqrt(2)/T2* (rad/us) gives fringe contrast
// A exp(-(tau/T2*)^2).
struct RamseyConfig {
  double t2_star_us = 15.0;
  double amplitude = 0.88;
  std::vector<double> phase_grid_rad;  // filled by defaults()

  static RamseyConfig defaults();
  void validate() const;
  double detuning_sigma_rad_per_us() const;
};

// Sampled up-fraction at (tau, phase) over n_shots.
double ramsey_signal(const RamseyConfig& cfg, double tau_us, double phase_rad,
                     int n_shots, std::uint64_t seed);

double ramsey_analytic_mean(const RamseyConfig& cfg, double tau_us, double phase_rad);
double ramsey_analytic_contrast(const RamseyConfig& cfg, double tau_us);

// Fringe contrast at fixed tau estimated from sampled fractions on the phase
// grid (least-squares quadrature projection).
double estimate_fringe_contrast(const RamseyConfig& cfg, double tau_us, int n_shots,
                                std::uint64_t seed);

struct RabiFitResult {
  double omega_MHz = 0.0;
  double contrast_loss_per_2pi = 0.0;
  double initial_contrast = 0.0;
  bool converged = false;
};

// Fit channel-corrected Rabi data to
// p(t) = 1/2 (1 + C0 (1 - dC)^{Omega t} cos(2 pi Omega t)).
// Requires >= 8 points spanning >= 2 oscillation periods.
RabiFitResult fit_rabi(std::span<const std::pair<double, double>> data_t_ptilde,
                       const MeasurementChannel& ch);

struct RamseyFitResult {
  double amplitude = 0.0;
  double t2_star_us = 0.0;
  bool converged = false;
  std::string flag;  // "no_decay" when T2* exceeds 10x the probed range
};

struct ContrastPoint {
  double tau_us = 0.0;
  double contrast = 0.0;
};

// Least-squares fit of contrast-vs-tau to A exp(-(tau/T2*)^2).
RamseyFitResult fit_ramsey(std::span<const ContrastPoint> data);

// Reference-drift correction: an affine rescaling that maps the two reference
// measurements (no rotation -> p = 1; no preparation -> p = 0) back to their
// nominal channel outputs.
double rescale_with_references(double p_tilde_observed, double ref_full,
                               double ref_empty, const MeasurementChannel& ch);

struct ZeemanSplittings {
  double p32_MHz = 0.0;
  double s12_MHz = 0.0;
};

// Linear Zeeman splittings between neighboring magnetic sublevels:
// g_J mu_B B with g_J = 4/3 (P3/2) and 2 (S1/2).
ZeemanSplittings zeeman_splittings(double b_gauss);

// Dephasing of the ensemble-averaged Rabi oscillation if two excitations were
// present: each sampled pair acquires interaction phase 2 pi V(R) t. Returns
// the contrast envelope |<exp(i 2 pi V t)>| on the time grid, plus the
// modulated oscillation at omega for reference.
struct WashoutCurve {
  std::vector<double> t_us;
  std::vector<double> envelope;
  std::vector<double> signal;
};

WashoutCurve two_excitation_contrast(const PairModel& model,
                                     const CloudGeometry& geom, double omega_MHz,
                                     std::span<const double> t_grid_us, int n_pairs,
                                     std::uint64_t seed);

}  // namespace rydsim
