#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rydsim/telegraph.hpp"

namespace rydsim {

// Threshold classifier: counts <= threshold are identified as the blockaded
// (qubit-present, "up") state.
struct Classifier {
  int threshold = 30;
  Window window;
};

struct ThresholdResult {
  int threshold = 0;
  double fidelity = 0.0;  // balanced average of the two correct-classification probs
};

// Sweep integer thresholds and maximize
// F(th) = 1/2 [P(n <= th | up) + P(n > th | down)]; smallest argmax on ties.
ThresholdResult optimal_threshold(const CountPmf& pmf_up, const CountPmf& pmf_down);

// Calibrate the blockaded rate so the optimal-threshold fidelity at the given
// window equals target_fd to within 0.002. The up distribution is evaluated at
// f_prep = 1 (preparation error removed). Throws std::runtime_error naming the
// achievable range when the target cannot be met.
double calibrate_r_low(double target_fd, const TelegraphParams& fixed,
                       const Window& w);

struct TelegraphFit {
  double r_high_per_us = 0.0;
  double r_low_per_us = 0.0;
  double gamma_loss_per_us = 0.0;
  double gamma_imp_per_us = 0.0;
  double f_prep = 0.0;
  double log_likelihood = 0.0;
  bool converged = false;
  int n_restarts_used = 0;
  std::string flag;  // "", "degenerate_data", "unidentifiable"
};

struct WindowHistogram {
  Window window;
  std::vector<long> counts;  // occurrences of n = 0, 1, ...
};

// Joint maximum-likelihood fit of (r_high, r_low, gamma_loss, f_prep) to
// prepared-run histograms at two or more window start times (gamma_imp held
// fixed at its init value). Bounded Nelder-Mead with 8 restarts on
// log/logit-transformed coordinates.
TelegraphFit fit_histograms(std::span<const WindowHistogram> histograms,
                            const TelegraphFit& init, bool prepared,
                            std::uint64_t seed = 0x5eedULL);

// Unprepared-run fit of (r_high, r_low, gamma_imp) to a single histogram.
// Flags the fit unidentifiable when the fitted rates nearly coincide.
TelegraphFit fit_impurity(const WindowHistogram& histogram, const TelegraphFit& init,
                          std::uint64_t seed = 0x5eedULL);

// Repeated-measurement statistics: two consecutive equal windows classified
// with the same threshold, simulated for the prepared and unprepared
// ensembles. detect_up[k][e] is the probability of an "up" outcome in window
// k (0 = first) for ensemble e (0 = prepared). agreement_prepared is the
// probability that the two outcomes coincide within the prepared ensemble.
struct RepeatedMeasurementTable {
  double detect_up[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  double agreement_prepared = 0.0;
  double agreement_unprepared = 0.0;
  int n_shots = 0;
};

RepeatedMeasurementTable repeated_measurement_table(const TelegraphParams& p,
                                                    const Classifier& cls,
                                                    int n_shots, std::uint64_t seed);

// Transistor gain: mean detected-count difference caused by one gate
// excitation, mean(unprepared) - mean(prepared at f_prep = 1), plus the
// input-referred value divided by the collection and detection efficiencies.
struct GainResult {
  double detected = 0.0;
  double input_referred = 0.0;
};

GainResult transistor_gain(const TelegraphParams& p, const Window& w);

// Best detection fidelity as a function of the transparent photon rate, with
// the impurity rate scaled as gamma_imp = beta * r_high, the blockaded rate
// scaled proportionally to r_high, and the window length optimized over
// [3, 8] us (0.5 us steps) together with the threshold.
struct RateSweepPoint {
  double r_high_per_us = 0.0;
  double gamma_imp_per_us = 0.0;
  double best_fidelity = 0.0;
  double best_window_us = 0.0;
  int best_threshold = 0;
};

std::vector<RateSweepPoint> fidelity_vs_rate(std::span<const double> r_high_grid,
                                             double beta,
                                             const TelegraphParams& base);

}  // namespace rydsim
