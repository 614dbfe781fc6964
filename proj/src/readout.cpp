#include "rydsim/readout.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rydsim/estimate.hpp"
#include "rydsim/rng.hpp"

namespace rydsim {

ThresholdResult optimal_threshold(const CountPmf& pmf_up, const CountPmf& pmf_down) {
  const int n_max =
      std::max(static_cast<int>(pmf_up.p.size()), static_cast<int>(pmf_down.p.size())) -
      1;
  ThresholdResult best{0, -1.0};
  double cdf_up = 0.0;
  double cdf_down = 0.0;
  for (int th = 0; th <= n_max; ++th) {
    if (th < static_cast<int>(pmf_up.p.size())) cdf_up += pmf_up.p[th];
    if (th < static_cast<int>(pmf_down.p.size())) cdf_down += pmf_down.p[th];
    const double f = 0.5 * (cdf_up + 1.0 - cdf_down);
    if (f > best.fidelity + 1e-15) {
      best.threshold = th;
      best.fidelity = f;
    }
  }
  return best;
}

namespace {

// Optimal-threshold fidelity with preparation error removed from the up side.
double fidelity_at_rlow(const TelegraphParams& fixed, const Window& w, double r_low) {
  TelegraphParams p = fixed;
  p.r_low_per_us = r_low;
  TelegraphParams up = p;
  up.f_prep = 1.0;
  const CountPmf pmf_up = exact_pmf(up, w, /*prepared=*/true);
  const CountPmf pmf_down = exact_pmf(p, w, /*prepared=*/false);
  return optimal_threshold(pmf_up, pmf_down).fidelity;
}

}  // namespace

double calibrate_r_low(double target_fd, const TelegraphParams& fixed,
                       const Window& w) {
  w.validate();
  if (target_fd <= 0.5) return fixed.r_high_per_us;  // degenerate limit

  // Fidelity decreases monotonically as r_low approaches r_high.
  const double r_hi_probe = fixed.r_high_per_us * (1.0 - 1e-6);
  const double fd_best = fidelity_at_rlow(fixed, w, 0.0);
  if (target_fd > fd_best) {
    std::ostringstream msg;
    msg << "calibrate_r_low: target fidelity " << target_fd
        << " unreachable; achievable range is (0.5, " << fd_best << "]";
    throw std::runtime_error(msg.str());
  }

  double lo = 0.0, hi = r_hi_probe;
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (fidelity_at_rlow(fixed, w, mid) > target_fd)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

bool all_histograms_degenerate(std::span<const WindowHistogram> histograms) {
  for (const auto& h : histograms) {
    int support = 0;
    for (long c : h.counts)
      if (c > 0) ++support;
    if (support > 1) return false;
  }
  return true;
}

}  // namespace

TelegraphFit fit_histograms(std::span<const WindowHistogram> histograms,
                            const TelegraphFit& init, bool prepared,
                            std::uint64_t seed) {
  // (gamma_loss, f_prep) are only separable when the blocked fraction is
  // probed at two or more distinct delays.
  std::size_t distinct_starts = 0;
  for (std::size_t i = 0; i < histograms.size(); ++i) {
    bool seen = false;
    for (std::size_t j = 0; j < i; ++j)
      seen = seen ||
             histograms[j].window.t_start_us == histograms[i].window.t_start_us;
    distinct_starts += !seen;
  }
  if (distinct_starts < 2)
    throw std::invalid_argument(
        "fit_histograms: need >= 2 windows with distinct start times");

  TelegraphFit fit = init;
  if (all_histograms_degenerate(histograms)) {
    fit.flag = "degenerate_data";
    fit.converged = false;
    return fit;
  }

  // Parameters: (r_high, r_low/r_high, gamma_loss, f_prep); the rate ratio
  // keeps r_low < r_high structurally.
  Objective obj;
  obj.dimension = 4;
  obj.bounds = {
      ParamBound{0.0, 0.0, Transform::Log},     // r_high
      ParamBound{0.0, 1.0, Transform::Logit},   // r_low / r_high
      ParamBound{0.0, 0.0, Transform::Log},     // gamma_loss
      ParamBound{0.0, 1.0, Transform::Logit},   // f_prep
  };
  const double gamma_imp = init.gamma_imp_per_us;
  obj.eval = [&histograms, gamma_imp, prepared](std::span<const double> x) {
    TelegraphParams p;
    p.r_high_per_us = x[0];
    p.r_low_per_us = x[1] * x[0];
    p.gamma_loss_per_us = x[2];
    p.gamma_imp_per_us = gamma_imp;
    p.f_prep = x[3];
    double nll = 0.0;
    for (const auto& h : histograms) {
      const CountPmf pmf = exact_pmf(p, h.window, prepared, 128);
      nll -= poisson_histogram_loglik(pmf.p, h.counts);
    }
    return nll;
  };

  const double rh0 = std::max(init.r_high_per_us, 0.1);
  const double x0[4] = {rh0,
                        std::clamp(init.r_low_per_us / rh0, 1e-4, 1.0 - 1e-4),
                        std::max(init.gamma_loss_per_us, 1e-4),
                        std::clamp(init.f_prep, 1e-4, 1.0 - 1e-4)};
  FitResult r = minimize(obj, x0, /*restarts=*/8, /*tol=*/1e-7, seed);

  fit.r_high_per_us = r.point[0];
  fit.r_low_per_us = r.point[1] * r.point[0];
  fit.gamma_loss_per_us = r.point[2];
  fit.gamma_imp_per_us = gamma_imp;
  fit.f_prep = r.point[3];
  fit.log_likelihood = -r.value;
  fit.converged = r.converged;
  fit.n_restarts_used = 8;
  return fit;
}

TelegraphFit fit_impurity(const WindowHistogram& histogram, const TelegraphFit& init,
                          std::uint64_t seed) {
  TelegraphFit fit = init;
  int support = 0;
  for (long c : histogram.counts)
    if (c > 0) ++support;
  if (support <= 1) {
    fit.flag = "degenerate_data";
    fit.converged = false;
    return fit;
  }

  Objective obj;
  obj.dimension = 3;
  obj.bounds = {
      ParamBound{0.0, 0.0, Transform::Log},    // r_high
      ParamBound{0.0, 1.0, Transform::Logit},  // r_low / r_high
      ParamBound{0.0, 0.0, Transform::Log},    // gamma_imp
  };
  obj.eval = [&histogram](std::span<const double> x) {
    TelegraphParams p;
    p.r_high_per_us = x[0];
    p.r_low_per_us = x[1] * x[0];
    p.gamma_imp_per_us = x[2];
    p.gamma_loss_per_us = 0.0;
    p.f_prep = 1.0;
    const CountPmf pmf = exact_pmf(p, histogram.window, /*prepared=*/false, 128);
    return -poisson_histogram_loglik(pmf.p, histogram.counts);
  };

  const double rh0 = std::max(init.r_high_per_us, 0.1);
  const double x0[3] = {rh0,
                        std::clamp(init.r_low_per_us / rh0, 1e-4, 1.0 - 1e-4),
                        std::max(init.gamma_imp_per_us, 1e-4)};
  FitResult r = minimize(obj, x0, /*restarts=*/8, /*tol=*/1e-7, seed);

  fit.r_high_per_us = r.point[0];
  fit.r_low_per_us = r.point[1] * r.point[0];
  fit.gamma_imp_per_us = r.point[2];
  fit.log_likelihood = -r.value;
  fit.converged = r.converged;
  fit.n_restarts_used = 8;

  // The switch rate is unidentified when the telegraph model does not beat a
  // plain Poisson fit (rate-degenerate or switchless data land on a flat
  // likelihood ridge).
  double shots = 0.0, total = 0.0;
  for (std::size_t n = 0; n < histogram.counts.size(); ++n) {
    shots += static_cast<double>(histogram.counts[n]);
    total += static_cast<double>(n) * histogram.counts[n];
  }
  const double mle_rate = total / shots / histogram.window.t_len_us;
  std::vector<double> poisson(histogram.counts.size(), 0.0);
  const double lam = mle_rate * histogram.window.t_len_us;
  poisson[0] = std::exp(-lam);
  for (std::size_t n = 1; n < poisson.size(); ++n)
    poisson[n] = poisson[n - 1] * lam / static_cast<double>(n);
  const double ll_poisson = poisson_histogram_loglik(poisson, histogram.counts);
  if (fit.log_likelihood - ll_poisson < 2.0) fit.flag = "unidentifiable";
  return fit;
}

RepeatedMeasurementTable repeated_measurement_table(const TelegraphParams& p,
                                                    const Classifier& cls,
                                                    int n_shots,
                                                    std::uint64_t seed) {
  cls.window.validate();
  if (cls.threshold < 0)
    throw std::invalid_argument("Classifier: threshold must be >= 0");
  Window w1 = cls.window;
  Window w2{w1.t_end_us(), w1.t_len_us};

  RepeatedMeasurementTable table;
  table.n_shots = n_shots;
  for (int ensemble = 0; ensemble < 2; ++ensemble) {
    const bool prepared = ensemble == 0;
    auto joint = two_window_joint(p, w1, w2, prepared, n_shots,
                                  seed_derive(seed, "table-ensemble", ensemble));
    long up1 = 0, up2 = 0, same = 0;
    for (const auto& [n1, n2] : joint) {
      const bool o1 = n1 <= cls.threshold;
      const bool o2 = n2 <= cls.threshold;
      up1 += o1;
      up2 += o2;
      same += o1 == o2;
    }
    table.detect_up[0][ensemble] = static_cast<double>(up1) / n_shots;
    table.detect_up[1][ensemble] = static_cast<double>(up2) / n_shots;
    const double agreement = static_cast<double>(same) / n_shots;
    if (prepared)
      table.agreement_prepared = agreement;
    else
      table.agreement_unprepared = agreement;
  }
  return table;
}

GainResult transistor_gain(const TelegraphParams& p, const Window& w) {
  TelegraphParams up = p;
  up.f_prep = 1.0;
  GainResult g;
  g.detected = exact_mean(p, w, /*prepared=*/false) - exact_mean(up, w, true);
  g.input_referred = g.detected / (p.collection_eff * p.detection_eff);
  return g;
}

std::vector<RateSweepPoint> fidelity_vs_rate(std::span<const double> r_high_grid,
                                             double beta,
                                             const TelegraphParams& base) {
  if (beta < 0.0) throw std::invalid_argument("fidelity_vs_rate: beta must be >= 0");
  std::vector<RateSweepPoint> out;
  out.reserve(r_high_grid.size());
  const double rate_ratio = base.r_low_per_us / base.r_high_per_us;
  for (double r_high : r_high_grid) {
    RateSweepPoint pt;
    pt.r_high_per_us = r_high;
    pt.gamma_imp_per_us = beta * r_high;
    TelegraphParams p = base;
    p.r_high_per_us = r_high;
    p.r_low_per_us = rate_ratio * r_high;
    p.gamma_imp_per_us = pt.gamma_imp_per_us;
    p.f_prep = 1.0;
    pt.best_fidelity = 0.5;
    for (double t_len = 3.0; t_len <= 8.0 + 1e-9; t_len += 0.5) {
      const Window w{0.0, t_len};
      const CountPmf up = exact_pmf(p, w, /*prepared=*/true, 128);
      const CountPmf down = exact_pmf(p, w, /*prepared=*/false, 128);
      const ThresholdResult th = optimal_threshold(up, down);
      if (th.fidelity > pt.best_fidelity) {
        pt.best_fidelity = th.fidelity;
        pt.best_window_us = t_len;
        pt.best_threshold = th.threshold;
      }
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace rydsim
