#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace rydsim {

// Photon-count model: Poisson counting whose rate switches at most once, at a
// random exponential time measured from the end of preparation.
//
// Prepared run: with probability f_prep the qubit atom is present and the
// ensemble starts blockaded (rate r_low); the atom is lost at rate gamma_loss,
// after which the rate jumps to r_high. With probability 1 - f_prep the run
// behaves like an unprepared one. Unprepared run: transparent (rate r_high)
// until a Rydberg impurity is created at rate gamma_imp, which blocks
// transmission (rate r_low).
struct TelegraphParams {
  double r_high_per_us = 8.0;
  double r_low_per_us = 3.419;
  double gamma_loss_per_us = 0.035;
  double gamma_imp_per_us = 0.015;
  double f_prep = 0.93;
  double collection_eff = 0.90;
  double detection_eff = 0.47;

  static TelegraphParams defaults() { return {}; }
  void validate() const;
};

struct Window {
  double t_start_us = 0.0;
  double t_len_us = 6.0;

  void validate() const;
  double t_end_us() const { return t_start_us + t_len_us; }
};

struct CountPmf {
  std::vector<double> p;  // probabilities over n = 0 .. p.size()-1

  int n_max() const { return static_cast<int>(p.size()) - 1; }
  double sum() const;
  double mean() const;
  double variance() const;
  double cdf(int n) const;  // P(N <= n)
};

struct Trajectory {
  bool started_blocked = false;
  std::optional<double> switch_time_us;  // measured from t = 0
  long counts = 0;
  std::vector<long> binned_counts;  // 0.5 us bins across the window
};

inline constexpr double kTrajectoryBinUs = 0.5;

// One stochastic run; deterministic for a fixed seed. Counts are Poisson with
// the integrated rate over the window, drawn per bin so the binned counts sum
// to the total exactly.
Trajectory simulate_trajectory(const TelegraphParams& p, const Window& w,
                               bool prepared, std::uint64_t seed);

// Exact count distribution: the Poisson count marginalized over the switch
// time by composite Gauss-Legendre quadrature (quad_nodes total nodes), with
// the no-switch/pre-window terms handled in closed form. The support is chosen
// so the truncated tail mass is below 1e-12.
CountPmf exact_pmf(const TelegraphParams& p, const Window& w, bool prepared,
                   int quad_nodes = 256);

// Closed-form moments from conditioning on the switch time.
double exact_mean(const TelegraphParams& p, const Window& w, bool prepared);
double exact_variance(const TelegraphParams& p, const Window& w, bool prepared);

// Expected detected rate at each time: r_low * P_blocked(t) + r_high * (1 -
// P_blocked(t)), with P_blocked(t) = f_prep e^{-gamma_loss t} + (1 - f_prep)
// (1 - e^{-gamma_imp t}) for prepared runs and 1 - e^{-gamma_imp t} otherwise.
std::vector<double> mean_rate_curve(const TelegraphParams& p, bool prepared,
                                    std::span<const double> t_grid_us);

// Per-shot counts in two non-overlapping windows sharing one switch time.
// Throws std::invalid_argument when the windows overlap.
std::vector<std::pair<long, long>> two_window_joint(const TelegraphParams& p,
                                                    const Window& w1,
                                                    const Window& w2, bool prepared,
                                                    int n_shots, std::uint64_t seed);

// Count histograms over n = 0..n_max. The plain sampler draws i.i.d.
// trajectories; the stratified sampler Latin-hypercube-stratifies the
// branch/switch quantile and the count quantile (unbiased, much lower
// histogram noise; used for distribution-level comparisons).
std::vector<long> sample_count_histogram(const TelegraphParams& p, const Window& w,
                                         bool prepared, int n_shots,
                                         std::uint64_t seed, int n_max);
std::vector<long> sample_count_histogram_stratified(const TelegraphParams& p,
                                                    const Window& w, bool prepared,
                                                    int n_shots, std::uint64_t seed,
                                                    int n_max);

// Total variation distance between a pmf and an empirical count histogram.
double total_variation(const CountPmf& pmf, std::span<const long> hist);

}  // namespace rydsim
