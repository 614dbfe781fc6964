#include "rydsim/telegraph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rydsim/estimate.hpp"
#include "rydsim/rng.hpp"

namespace rydsim {

void TelegraphParams::validate() const {
  if (!(r_low_per_us >= 0.0 && r_high_per_us > r_low_per_us))
    throw std::invalid_argument("TelegraphParams: need 0 <= r_low < r_high");
  if (gamma_loss_per_us < 0.0 || gamma_imp_per_us < 0.0)
    throw std::invalid_argument("TelegraphParams: rates must be >= 0");
  if (!(f_prep >= 0.0 && f_prep <= 1.0))
    throw std::invalid_argument("TelegraphParams: f_prep in [0, 1]");
  if (!(collection_eff > 0.0 && collection_eff <= 1.0) ||
      !(detection_eff > 0.0 && detection_eff <= 1.0))
    throw std::invalid_argument("TelegraphParams: efficiencies in (0, 1]");
}

void Window::validate() const {
  if (t_start_us < 0.0) throw std::invalid_argument("Window: t_start must be >= 0");
  if (!(t_len_us > 0.0)) throw std::invalid_argument("Window: t_len must be > 0");
}

double CountPmf::sum() const { return std::accumulate(p.begin(), p.end(), 0.0); }

double CountPmf::mean() const {
  double m = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) m += static_cast<double>(n) * p[n];
  return m;
}

double CountPmf::variance() const {
  const double m = mean();
  double s = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    const double d = static_cast<double>(n) - m;
    s += d * d * p[n];
  }
  return s;
}

double CountPmf::cdf(int n) const {
  double c = 0.0;
  for (int k = 0; k <= n && k < static_cast<int>(p.size()); ++k) c += p[k];
  return c;
}

namespace {

// One switching branch: the run starts in a state with rate r_in and switches
// to r_out at Exp(gamma) measured from t = 0.
struct BranchSpec {
  double weight;
  double gamma;
  double r_in;
  double r_out;
};

// Branch mixture for a run; at most two entries.
std::vector<BranchSpec> branches(const TelegraphParams& p, bool prepared) {
  std::vector<BranchSpec> b;
  if (prepared) {
    if (p.f_prep > 0.0)
      b.push_back({p.f_prep, p.gamma_loss_per_us, p.r_low_per_us, p.r_high_per_us});
    if (p.f_prep < 1.0)
      b.push_back(
          {1.0 - p.f_prep, p.gamma_imp_per_us, p.r_high_per_us, p.r_low_per_us});
  } else {
    b.push_back({1.0, p.gamma_imp_per_us, p.r_high_per_us, p.r_low_per_us});
  }
  return b;
}

// Integrated intensity over [w.t_start, w.t_end) given the switch time.
double window_intensity(const BranchSpec& br, const Window& w, double switch_time) {
  const double in_time =
      std::clamp(switch_time - w.t_start_us, 0.0, w.t_len_us);
  return br.r_in * in_time + br.r_out * (w.t_len_us - in_time);
}

// Time spent in the initial state within the window: mean and second moment
// of B = clamp(S - a, 0, T) for S ~ Exp(gamma).
void initial_state_time_moments(double gamma, double a, double T, double& eb,
                                double& eb2) {
  if (gamma <= 0.0) {
    eb = T;
    eb2 = T * T;
    return;
  }
  const double ea = std::exp(-gamma * a);
  const double et = std::expm1(-gamma * T);  // e^{-gT} - 1
  eb = ea * (-et) / gamma;
  eb2 = ea * 2.0 * ((-et) - gamma * T * std::exp(-gamma * T)) / (gamma * gamma);
}

int support_size(const TelegraphParams& p, const Window& w) {
  const double lam_max = p.r_high_per_us * w.t_len_us;
  return static_cast<int>(std::ceil(lam_max + 12.0 * std::sqrt(lam_max) + 30.0));
}

// Poisson row P(n; lambda) for n = 0..n_max, accumulated into out with weight.
void add_poisson_row(std::vector<double>& out, double lambda, double weight) {
  if (weight == 0.0) return;
  const int n_max = static_cast<int>(out.size()) - 1;
  if (lambda <= 0.0) {
    out[0] += weight;
    return;
  }
  double p = std::exp(-lambda);
  out[0] += weight * p;
  for (int n = 1; n <= n_max; ++n) {
    p *= lambda / n;
    out[n] += weight * p;
  }
}

// Quantile-couple the branch mixture and the switch time to a single uniform,
// so one stratified variable covers both. Returns the branch and switch time.
std::pair<const BranchSpec*, double> branch_and_switch_from_uniform(
    const std::vector<BranchSpec>& mix, double u) {
  double lo = 0.0;
  for (const auto& br : mix) {
    if (u <= lo + br.weight || &br == &mix.back()) {
      double v = std::clamp((u - lo) / br.weight, 0.0, 1.0 - 1e-16);
      double s = br.gamma > 0.0
                     ? -std::log1p(-v) / br.gamma
                     : std::numeric_limits<double>::infinity();
      return {&br, s};
    }
    lo += br.weight;
  }
  return {&mix.back(), std::numeric_limits<double>::infinity()};
}

}  // namespace

Trajectory simulate_trajectory(const TelegraphParams& p, const Window& w,
                               bool prepared, std::uint64_t seed) {
  p.validate();
  w.validate();
  Rng rng(seed);

  BranchSpec br{1.0, p.gamma_imp_per_us, p.r_high_per_us, p.r_low_per_us};
  if (prepared && rng.uniform() < p.f_prep)
    br = {p.f_prep, p.gamma_loss_per_us, p.r_low_per_us, p.r_high_per_us};

  Trajectory traj;
  traj.started_blocked = br.r_in == p.r_low_per_us;
  const double s = rng.exponential(br.gamma);
  if (std::isfinite(s)) traj.switch_time_us = s;

  const int n_bins =
      static_cast<int>(std::ceil(w.t_len_us / kTrajectoryBinUs - 1e-12));
  traj.binned_counts.resize(n_bins);
  for (int b = 0; b < n_bins; ++b) {
    const double b0 = w.t_start_us + b * kTrajectoryBinUs;
    const double b1 = std::min(b0 + kTrajectoryBinUs, w.t_end_us());
    Window bin{b0, b1 - b0};
    const double lam = window_intensity(br, bin, s);
    traj.binned_counts[b] = rng.poisson(lam);
    traj.counts += traj.binned_counts[b];
  }
  return traj;
}

CountPmf exact_pmf(const TelegraphParams& p, const Window& w, bool prepared,
                   int quad_nodes) {
  p.validate();
  w.validate();
  if (quad_nodes < 16) throw std::invalid_argument("exact_pmf: need >= 16 nodes");

  const double a = w.t_start_us;
  const double T = w.t_len_us;
  CountPmf pmf;
  pmf.p.assign(support_size(p, w) + 1, 0.0);

  const int per_panel = 16;
  const int panels = std::max(1, quad_nodes / per_panel);
  const GaussRule& rule = gauss_legendre(per_panel);
  const double h = T / panels;

  for (const BranchSpec& br : branches(p, prepared)) {
    if (br.gamma <= 0.0) {
      add_poisson_row(pmf.p, br.r_in * T, br.weight);
      continue;
    }
    const double q_pre = -std::expm1(-br.gamma * a);       // switch before window
    const double q_post = std::exp(-br.gamma * w.t_end_us());  // none by window end
    add_poisson_row(pmf.p, br.r_out * T, br.weight * q_pre);
    add_poisson_row(pmf.p, br.r_in * T, br.weight * q_post);
    for (int panel = 0; panel < panels; ++panel) {
      const double mid = a + panel * h + 0.5 * h;
      for (int i = 0; i < per_panel; ++i) {
        const double s = mid + 0.5 * h * rule.nodes[i];
        const double density = br.gamma * std::exp(-br.gamma * s);
        const double lam = window_intensity(br, w, s);
        add_poisson_row(pmf.p, lam, br.weight * 0.5 * h * rule.weights[i] * density);
      }
    }
  }
  return pmf;
}

double exact_mean(const TelegraphParams& p, const Window& w, bool prepared) {
  p.validate();
  w.validate();
  double m = 0.0;
  for (const BranchSpec& br : branches(p, prepared)) {
    double eb, eb2;
    initial_state_time_moments(br.gamma, w.t_start_us, w.t_len_us, eb, eb2);
    m += br.weight * (br.r_out * w.t_len_us + (br.r_in - br.r_out) * eb);
  }
  return m;
}

double exact_variance(const TelegraphParams& p, const Window& w, bool prepared) {
  p.validate();
  w.validate();
  // Law of total variance over (branch, switch time): Var N = E Lambda +
  // Var Lambda, with Lambda = r_out T + (r_in - r_out) B per branch.
  double mean_total = 0.0;
  double second_moment = 0.0;  // E[Lambda] + E[Lambda^2] accumulated per branch
  for (const BranchSpec& br : branches(p, prepared)) {
    double eb, eb2;
    initial_state_time_moments(br.gamma, w.t_start_us, w.t_len_us, eb, eb2);
    const double base = br.r_out * w.t_len_us;
    const double d = br.r_in - br.r_out;
    const double m1 = base + d * eb;
    const double m2 = base * base + 2.0 * base * d * eb + d * d * eb2;
    mean_total += br.weight * m1;
    second_moment += br.weight * (m1 + m2);
  }
  return second_moment - mean_total * mean_total;
}

std::vector<double> mean_rate_curve(const TelegraphParams& p, bool prepared,
                                    std::span<const double> t_grid_us) {
  p.validate();
  std::vector<double> out;
  out.reserve(t_grid_us.size());
  for (std::size_t i = 0; i < t_grid_us.size(); ++i) {
    if (i > 0 && t_grid_us[i] < t_grid_us[i - 1])
      throw std::invalid_argument("mean_rate_curve: grid must be sorted");
    const double t = t_grid_us[i];
    double p_blocked;
    if (prepared) {
      p_blocked = p.f_prep * std::exp(-p.gamma_loss_per_us * t) +
                  (1.0 - p.f_prep) * (-std::expm1(-p.gamma_imp_per_us * t));
    } else {
      p_blocked = -std::expm1(-p.gamma_imp_per_us * t);
    }
    out.push_back(p_blocked * p.r_low_per_us + (1.0 - p_blocked) * p.r_high_per_us);
  }
  return out;
}

std::vector<std::pair<long, long>> two_window_joint(const TelegraphParams& p,
                                                    const Window& w1,
                                                    const Window& w2, bool prepared,
                                                    int n_shots,
                                                    std::uint64_t seed) {
  p.validate();
  w1.validate();
  w2.validate();
  if (w2.t_start_us < w1.t_end_us())
    throw std::invalid_argument("two_window_joint: windows overlap");
  std::vector<std::pair<long, long>> out;
  out.reserve(n_shots);
  for (int i = 0; i < n_shots; ++i) {
    Rng rng(seed_derive(seed, "joint-shot", static_cast<std::uint64_t>(i)));
    BranchSpec br{1.0, p.gamma_imp_per_us, p.r_high_per_us, p.r_low_per_us};
    if (prepared && rng.uniform() < p.f_prep)
      br = {p.f_prep, p.gamma_loss_per_us, p.r_low_per_us, p.r_high_per_us};
    const double s = rng.exponential(br.gamma);
    const long n1 = rng.poisson(window_intensity(br, w1, s));
    const long n2 = rng.poisson(window_intensity(br, w2, s));
    out.emplace_back(n1, n2);
  }
  return out;
}

std::vector<long> sample_count_histogram(const TelegraphParams& p, const Window& w,
                                         bool prepared, int n_shots,
                                         std::uint64_t seed, int n_max) {
  std::vector<long> hist(n_max + 1, 0);
  for (int i = 0; i < n_shots; ++i) {
    Trajectory t = simulate_trajectory(
        p, w, prepared, seed_derive(seed, "hist-shot", static_cast<std::uint64_t>(i)));
    hist[std::min<long>(t.counts, n_max)]++;
  }
  return hist;
}

std::vector<long> sample_count_histogram_stratified(const TelegraphParams& p,
                                                    const Window& w, bool prepared,
                                                    int n_shots, std::uint64_t seed,
                                                    int n_max) {
  p.validate();
  w.validate();
  const auto mix = branches(p, prepared);
  Rng rng(seed);

  // Latin hypercube across (branch+switch quantile, count quantile): stratify
  // both uniforms over n_shots cells and pair them through a seeded shuffle.
  std::vector<int> perm(n_shots);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n_shots - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform() * (i + 1));
    std::swap(perm[i], perm[j]);
  }

  std::vector<long> hist(n_max + 1, 0);
  for (int i = 0; i < n_shots; ++i) {
    const double u1 = (i + rng.uniform()) / n_shots;
    const double u2 = (perm[i] + rng.uniform()) / n_shots;
    const auto [br, s] = branch_and_switch_from_uniform(mix, u1);
    const double lam = window_intensity(*br, w, s);
    const long n = poisson_quantile(lam, u2);
    hist[std::min<long>(n, n_max)]++;
  }
  return hist;
}

double total_variation(const CountPmf& pmf, std::span<const long> hist) {
  const double n_total =
      std::accumulate(hist.begin(), hist.end(), 0.0);
  if (n_total <= 0.0) throw std::invalid_argument("total_variation: empty histogram");
  const std::size_t support = std::max(pmf.p.size(), hist.size());
  double tv = 0.0;
  for (std::size_t n = 0; n < support; ++n) {
    const double model = n < pmf.p.size() ? pmf.p[n] : 0.0;
    const double emp = n < hist.size() ? hist[n] / n_total : 0.0;
    tv += std::abs(model - emp);
  }
  return 0.5 * tv;
}

}  // namespace rydsim
