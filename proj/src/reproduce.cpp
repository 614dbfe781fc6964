#include "rydsim/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>

#include "rydsim/constants.hpp"
#include "rydsim/estimate.hpp"
#include "rydsim/readout.hpp"
#include "rydsim/report.hpp"
#include "rydsim/rng.hpp"

namespace rydsim {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct TargetContext {
  const RunConfig& cfg;
  fs::path dir;
  FileMeta meta;

  std::uint64_t seed(const std::string& label, std::uint64_t index = 0) const {
    return seed_derive(cfg.master_seed, label, index);
  }
};

json telegraph_params_json(const TelegraphParams& p) {
  return json{{"r_high_per_us", p.r_high_per_us},
              {"r_low_per_us", p.r_low_per_us},
              {"gamma_loss_per_us", p.gamma_loss_per_us},
              {"gamma_imp_per_us", p.gamma_imp_per_us},
              {"f_prep", p.f_prep},
              {"collection_eff", p.collection_eff},
              {"detection_eff", p.detection_eff}};
}

// ---- histograms: model and sampled count distributions, both ensembles ----
void target_histograms(const TargetContext& ctx) {
  const auto& p = ctx.cfg.telegraph;
  const Window w = ctx.cfg.window;
  const CountPmf up = exact_pmf(p, w, true);
  const CountPmf down = exact_pmf(p, w, false);
  const int n_max = std::max(up.n_max(), down.n_max());
  const int shots = ctx.cfg.shots.histogram;
  const auto hist_up = sample_count_histogram_stratified(p, w, true, shots,
                                                         ctx.seed("hist-up"), n_max);
  const auto hist_down = sample_count_histogram_stratified(
      p, w, false, shots, ctx.seed("hist-down"), n_max);

  CsvWriter csv(ctx.dir / "histograms.csv", ctx.meta,
                {"count", "p_up_model", "p_down_model", "p_up_sampled",
                 "p_down_sampled"});
  for (int n = 0; n <= n_max; ++n) {
    const double mu = n <= up.n_max() ? up.p[n] : 0.0;
    const double md = n <= down.n_max() ? down.p[n] : 0.0;
    csv.row(std::vector<double>{static_cast<double>(n), mu, md,
                                hist_up[n] / static_cast<double>(shots),
                                hist_down[n] / static_cast<double>(shots)});
  }

  TelegraphParams up_ref = p;
  up_ref.f_prep = 1.0;
  const ThresholdResult th =
      optimal_threshold(exact_pmf(up_ref, w, true), down);
  write_json_file(ctx.dir / "summary.json",
                  json{{"threshold", th.threshold},
                       {"detection_fidelity", th.fidelity},
                       {"mean_up", up.mean()},
                       {"mean_down", down.mean()},
                       {"tv_up", total_variation(up, hist_up)},
                       {"tv_down", total_variation(down, hist_down)},
                       {"shots", shots},
                       {"params", telegraph_params_json(p)}},
                  ctx.meta);
}

// ---- rate_trace: time-resolved detected rate, model vs binned trajectories --
void target_rate_trace(const TargetContext& ctx) {
  const auto& p = ctx.cfg.telegraph;
  const Window w{0.0, 2.0 * ctx.cfg.window.t_len_us};
  const int n_bins = static_cast<int>(std::round(w.t_len_us / kTrajectoryBinUs));
  const int shots = ctx.cfg.shots.trace;

  std::vector<double> centers(n_bins);
  for (int b = 0; b < n_bins; ++b) centers[b] = (b + 0.5) * kTrajectoryBinUs;

  std::map<bool, std::vector<double>> mc;
  for (bool prepared : {true, false}) {
    std::vector<double> acc(n_bins, 0.0);
    for (int i = 0; i < shots; ++i) {
      const Trajectory t = simulate_trajectory(
          p, w, prepared,
          ctx.seed(prepared ? "trace-up" : "trace-down", i));
      for (int b = 0; b < n_bins; ++b) acc[b] += t.binned_counts[b];
    }
    for (double& v : acc) v /= shots * kTrajectoryBinUs;
    mc[prepared] = std::move(acc);
  }
  const auto model_up = mean_rate_curve(p, true, centers);
  const auto model_down = mean_rate_curve(p, false, centers);

  CsvWriter csv(ctx.dir / "rate_trace.csv", ctx.meta,
                {"t_us", "rate_up_model", "rate_up_sampled", "rate_down_model",
                 "rate_down_sampled"});
  for (int b = 0; b < n_bins; ++b)
    csv.row(std::vector<double>{centers[b], model_up[b], mc[true][b], model_down[b],
                                mc[false][b]});
  write_json_file(
      ctx.dir / "summary.json",
      json{{"shots", shots},
           {"bin_us", kTrajectoryBinUs},
           {"params", telegraph_params_json(p)},
           // The observed loss rate dwarfs control-beam photoionization.
           {"loss_mechanism_comparison",
            {{"gamma_loss_per_us", p.gamma_loss_per_us},
             {"photoionization_per_us", constants::kPhotoionizationRatePerUs},
             {"ratio", p.gamma_loss_per_us / constants::kPhotoionizationRatePerUs}}}},
      ctx.meta);
}

// ---- joint_readout: two consecutive windows, per-shot scatter --------------
void target_joint_readout(const TargetContext& ctx) {
  const auto& p = ctx.cfg.telegraph;
  const Window w1 = ctx.cfg.window;
  const Window w2{w1.t_end_us(), w1.t_len_us};
  const int shots = ctx.cfg.shots.joint;

  CsvWriter csv(ctx.dir / "joint_counts.csv", ctx.meta,
                {"prepared", "counts_first", "counts_second"});
  json corr;
  for (bool prepared : {true, false}) {
    auto pts = two_window_joint(p, w1, w2, prepared, shots,
                                ctx.seed(prepared ? "joint-up" : "joint-down"));
    double m1 = 0, m2 = 0;
    for (auto& [a, b] : pts) {
      m1 += a;
      m2 += b;
      csv.row(std::vector<double>{prepared ? 1.0 : 0.0, static_cast<double>(a),
                                  static_cast<double>(b)});
    }
    m1 /= shots;
    m2 /= shots;
    double c11 = 0, c22 = 0, c12 = 0;
    for (auto& [a, b] : pts) {
      c11 += (a - m1) * (a - m1);
      c22 += (b - m2) * (b - m2);
      c12 += (a - m1) * (b - m2);
    }
    corr[prepared ? "prepared" : "unprepared"] = {
        {"mean_first", m1},
        {"mean_second", m2},
        {"correlation", c12 / std::sqrt(c11 * c22)}};
  }
  corr["params"] = telegraph_params_json(p);
  write_json_file(ctx.dir / "summary.json", corr, ctx.meta);
}

// ---- rabi: sampled oscillation through the measurement channel, then fit ---
void target_rabi(const TargetContext& ctx) {
  const RabiConfig& rc = ctx.cfg.rabi;
  const MeasurementChannel& ch = ctx.cfg.channel;
  const int reps = ctx.cfg.shots.rabi;
  Rng rng(ctx.seed("rabi-shots"));

  std::vector<std::pair<double, double>> data;
  const double t_max = 4.0 / rc.omega_MHz;  // four oscillation periods
  const int n_points = 48;
  for (int i = 0; i < n_points; ++i) {
    const double t = t_max * i / (n_points - 1);
    const double ptrue = rabi_population(rc, t);
    const double ptilde = apply_channel(ch, ptrue);
    long ups = 0;
    for (int s = 0; s < reps; ++s)
      if (rng.uniform() < ptilde) ++ups;
    data.emplace_back(t, static_cast<double>(ups) / reps);
  }
  const RabiFitResult fit = fit_rabi(data, ch);

  CsvWriter csv(ctx.dir / "rabi.csv", ctx.meta,
                {"t_us", "p_tilde_sampled", "p_corrected", "p_model"});
  for (const auto& [t, ptilde] : data)
    csv.row(std::vector<double>{t, ptilde, invert_channel(ch, ptilde).p,
                                rabi_population(rc, t)});
  write_json_file(ctx.dir / "fit.json",
                  json{{"omega_MHz", fit.omega_MHz},
                       {"contrast_loss_per_2pi", fit.contrast_loss_per_2pi},
                       {"initial_contrast", fit.initial_contrast},
                       {"pi_time_ns", 500.0 / fit.omega_MHz},
                       {"converged", fit.converged},
                       {"repetitions", reps}},
                  ctx.meta);
}

// ---- ramsey: fringe contrast vs delay, Gaussian-decay fit ------------------
void target_ramsey(const TargetContext& ctx) {
  const RamseyConfig& rc = ctx.cfg.ramsey;
  const int shots = ctx.cfg.shots.ramsey;
  std::vector<ContrastPoint> pts;
  CsvWriter csv(ctx.dir / "ramsey.csv", ctx.meta,
                {"tau_us", "contrast_sampled", "contrast_analytic"});
  const double taus[] = {1.0, 3.0, 6.0, 9.0, 12.0, 15.0, 18.0, 21.0};
  int idx = 0;
  for (double tau : taus) {
    const double c =
        estimate_fringe_contrast(rc, tau, shots, ctx.seed("ramsey-tau", idx++));
    pts.push_back({tau, c});
    csv.row(std::vector<double>{tau, c, ramsey_analytic_contrast(rc, tau)});
  }
  const RamseyFitResult fit = fit_ramsey(pts);
  write_json_file(ctx.dir / "fit.json",
                  json{{"amplitude", fit.amplitude},
                       {"t2_star_us", fit.t2_star_us},
                       {"converged", fit.converged},
                       {"flag", fit.flag},
                       {"shots_per_phase", shots}},
                  ctx.meta);
}

// ---- prep_scan: three-photon lineshape --------------------------------------
void target_prep_scan(const TargetContext& ctx) {
  std::vector<double> grid;
  for (double d = -3.0; d <= 3.0 + 1e-9; d += 0.15) grid.push_back(d);
  const ScanResult scan = scan_three_photon(ctx.cfg.prep, grid);

  CsvWriter csv(ctx.dir / "lineshape.csv", ctx.meta,
                {"detuning_MHz", "p_rprime", "p_r", "p_e"});
  for (const auto& pt : scan.points)
    csv.row(std::vector<double>{pt.detuning_MHz, pt.p_rprime, pt.p_r, pt.p_e});

  const EvolveResult res = evolve(ctx.cfg.prep);
  write_json_file(ctx.dir / "summary.json",
                  json{{"peak_MHz", scan.peak_MHz},
                       {"fwhm_MHz", scan.fwhm_MHz},
                       {"peak_p_rprime", scan.peak_p_rprime},
                       {"final_p_rprime", res.final_state.populations()[3]},
                       {"max_p_e", res.max_populations[1]},
                       {"max_p_r", res.max_populations[2]},
                       {"step_converged", res.step_converged}},
                  ctx.meta);
}

// ---- start_time_fit: synthetic histograms at staggered windows, ML fit -----
void target_start_time_fit(const TargetContext& ctx) {
  const auto& p = ctx.cfg.telegraph;
  const int shots = ctx.cfg.shots.fit_per_window;
  const double t_len = ctx.cfg.window.t_len_us;
  std::vector<WindowHistogram> hists;
  const int n_max = static_cast<int>(p.r_high_per_us * t_len +
                                     12 * std::sqrt(p.r_high_per_us * t_len) + 30);
  for (int k = 0; k < 4; ++k) {
    WindowHistogram wh;
    wh.window = {k * t_len, t_len};
    wh.counts = sample_count_histogram(p, wh.window, true, shots,
                                       ctx.seed("fit-window", k), n_max);
    hists.push_back(std::move(wh));

    CsvWriter csv(ctx.dir / ("histogram_start_" + std::to_string(k) + ".csv"),
                  ctx.meta, {"count", "occurrences"});
    for (int n = 0; n <= n_max; ++n)
      csv.row(std::vector<double>{static_cast<double>(n),
                                  static_cast<double>(hists.back().counts[n])});
  }
  TelegraphFit init;
  init.r_high_per_us = 7.0;
  init.r_low_per_us = 3.0;
  init.gamma_loss_per_us = 0.05;
  init.gamma_imp_per_us = p.gamma_imp_per_us;
  init.f_prep = 0.85;
  const TelegraphFit fit =
      fit_histograms(hists, init, /*prepared=*/true, ctx.seed("fit-optimizer"));
  write_json_file(ctx.dir / "fit.json",
                  json{{"true",
                        {{"r_high", p.r_high_per_us},
                         {"r_low", p.r_low_per_us},
                         {"gamma_loss", p.gamma_loss_per_us},
                         {"f_prep", p.f_prep}}},
                       {"fitted",
                        {{"r_high", fit.r_high_per_us},
                         {"r_low", fit.r_low_per_us},
                         {"gamma_loss", fit.gamma_loss_per_us},
                         {"f_prep", fit.f_prep}}},
                       {"log_likelihood", fit.log_likelihood},
                       {"converged", fit.converged},
                       {"shots_per_window", shots}},
                  ctx.meta);
}

// ---- fidelity_vs_rate: optimized readout fidelity against photon rate ------
void target_fidelity_vs_rate(const TargetContext& ctx) {
  std::vector<double> grid;
  for (double r = 1.0; r <= 20.0 + 1e-9; r += 1.0) grid.push_back(r);
  const auto sweep = fidelity_vs_rate(grid, ctx.cfg.sweep_beta, ctx.cfg.telegraph);

  CsvWriter csv(ctx.dir / "fidelity_vs_rate.csv", ctx.meta,
                {"r_high_per_us", "gamma_imp_per_us", "best_fidelity",
                 "best_window_us", "best_threshold"});
  double best_fd = 0.0, best_rate = 0.0;
  for (const auto& pt : sweep) {
    csv.row(std::vector<double>{pt.r_high_per_us, pt.gamma_imp_per_us,
                                pt.best_fidelity, pt.best_window_us,
                                static_cast<double>(pt.best_threshold)});
    if (pt.best_fidelity > best_fd) {
      best_fd = pt.best_fidelity;
      best_rate = pt.r_high_per_us;
    }
  }
  write_json_file(ctx.dir / "summary.json",
                  json{{"beta", ctx.cfg.sweep_beta},
                       {"best_fidelity", best_fd},
                       {"best_rate_per_us", best_rate}},
                  ctx.meta);
}

// ---- blockade: pair potentials, radii, averages, calibrated threshold ------
void target_blockade(const TargetContext& ctx) {
  const PairModel prep_model = ctx.cfg.prep_pair();
  const PairModel plus = ctx.cfg.detection_pair(Branch::Plus);
  const PairModel minus = ctx.cfg.detection_pair(Branch::Minus);
  const BlockadeThreshold g3 = ctx.cfg.prep_threshold();
  const BlockadeThreshold eit =
      calibrate_detection_threshold(ctx.cfg.target_r_plus_um);

  {
    CsvWriter csv(ctx.dir / "blockade.csv", ctx.meta,
                  {"theta_deg", "R_um", "V_MHz", "branch"});
    auto emit = [&](const PairModel& m, const char* branch, double theta_deg) {
      const double theta = theta_deg * std::numbers::pi / 180.0;
      for (double r = 2.0; r <= 20.0 + 1e-9; r += 0.1)
        csv.row(std::vector<std::string>{format_double(theta_deg),
                                         format_double(r),
                                         format_double(pair_potential(m, r, theta)),
                                         branch});
    };
    emit(plus, "plus", 0.0);
    emit(minus, "minus", 0.0);
    for (int deg = 0; deg <= 180; deg += 30) emit(prep_model, "prep", deg);
  }

  json surface = json::array();
  for (int deg = 0; deg <= 180; deg += 2) {
    const double theta = deg * std::numbers::pi / 180.0;
    const auto r = blockade_radius(prep_model, g3, theta);
    if (r) surface.push_back({{"theta_deg", deg}, {"r_b_um", *r}});
  }

  const auto r_prep = blockade_radius(prep_model, g3, 0.0);
  const auto r_plus = blockade_radius(plus, eit);
  const auto r_minus = blockade_radius(minus, eit);
  json j{{"calibrated_threshold_MHz", eit.threshold_MHz()},
         {"r_prep_axis_um", r_prep ? *r_prep : -1.0},
         {"r_plus_um", r_plus ? *r_plus : -1.0},
         {"r_minus_um", r_minus ? *r_minus : -1.0},
         {"branch_mean_um",
          blockade_average(plus, eit, AverageConvention::BranchMean)},
         {"prep_solid_angle_mean_um",
          blockade_average(prep_model, g3, AverageConvention::SolidAngleMean)},
         {"prep_axes_mean_um",
          blockade_average(prep_model, g3, AverageConvention::ArithmeticAxesMean)},
         {"prep_surface", surface}};
  json crossings = json::array();
  for (const auto& c : threshold_crossings(minus, eit, 0.0, 20.0))
    crossings.push_back(
        {{"r_um", c.r_um},
         {"direction", c.direction == CrossingDirection::Falling ? "falling"
                                                                 : "rising"}});
  j["minus_branch_crossings"] = crossings;
  write_json_file(ctx.dir / "summary.json", j, ctx.meta);
}

// ---- repeated_table: QND-style two-measurement statistics ------------------
void target_repeated_table(const TargetContext& ctx) {
  // Preparation error removed (f_prep = 1), matching how the detection
  // fidelity itself is quoted; the threshold is the calibrated optimum.
  TelegraphParams p = ctx.cfg.telegraph;
  p.f_prep = 1.0;
  const Window w = ctx.cfg.window;
  const ThresholdResult th =
      optimal_threshold(exact_pmf(p, w, true), exact_pmf(p, w, false));
  const Classifier cls{th.threshold, w};
  const RepeatedMeasurementTable table =
      repeated_measurement_table(p, cls, ctx.cfg.shots.table, ctx.seed("table"));

  CsvWriter csv(ctx.dir / "repeated_table.csv", ctx.meta,
                {"window", "ensemble", "detect_up", "no_detect"});
  const char* ens[2] = {"prepared", "unprepared"};
  for (int k = 0; k < 2; ++k)
    for (int e = 0; e < 2; ++e)
      csv.row(std::vector<std::string>{std::to_string(k + 1), ens[e],
                                       format_double(table.detect_up[k][e]),
                                       format_double(1.0 - table.detect_up[k][e])});
  write_json_file(
      ctx.dir / "summary.json",
      json{{"threshold", cls.threshold},
           {"first_detect_up_prepared", table.detect_up[0][0]},
           {"second_detect_up_prepared", table.detect_up[1][0]},
           {"first_detect_up_unprepared", table.detect_up[0][1]},
           {"second_detect_up_unprepared", table.detect_up[1][1]},
           {"agreement_prepared", table.agreement_prepared},
           {"agreement_unprepared", table.agreement_unprepared},
           {"gain_detected", transistor_gain(ctx.cfg.telegraph, w).detected},
           {"shots", table.n_shots}},
      ctx.meta);
}

using TargetFn = void (*)(const TargetContext&);

const std::vector<std::pair<std::string, TargetFn>>& target_table() {
  static const std::vector<std::pair<std::string, TargetFn>> table = {
      {"histograms", target_histograms},
      {"rate_trace", target_rate_trace},
      {"joint_readout", target_joint_readout},
      {"rabi", target_rabi},
      {"ramsey", target_ramsey},
      {"prep_scan", target_prep_scan},
      {"start_time_fit", target_start_time_fit},
      {"fidelity_vs_rate", target_fidelity_vs_rate},
      {"blockade", target_blockade},
      {"repeated_table", target_repeated_table},
  };
  return table;
}

TargetReport run_one(const RunConfig& cfg, const std::string& name, TargetFn fn,
                     const fs::path& out_dir) {
  TargetReport report;
  report.name = name;
  try {
    TargetContext ctx{cfg, out_dir / name,
                      FileMeta{constants::kVersion, config_hash(cfg),
                               seed_derive(cfg.master_seed, name, 0)}};
    fs::create_directories(ctx.dir);
    fn(ctx);
    report.ok = true;
  } catch (const std::exception& err) {
    report.ok = false;
    report.error = err.what();
  }
  return report;
}

}  // namespace

bool ReproduceReport::all_ok() const {
  return std::all_of(targets.begin(), targets.end(),
                     [](const TargetReport& t) { return t.ok; });
}

const std::vector<std::string>& reproduce_target_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : target_table()) out.push_back(name);
    return out;
  }();
  return names;
}

TargetReport run_target(const RunConfig& cfg, const std::string& name,
                        const fs::path& out_dir) {
  for (const auto& [n, fn] : target_table())
    if (n == name) return run_one(cfg, n, fn, out_dir);
  return {name, false, "unknown target"};
}

ReproduceReport reproduce_all(const RunConfig& cfg, const fs::path& out_dir,
                              int jobs) {
  fs::create_directories(out_dir);

  // Root-level provenance and canonical config.
  {
    FileMeta meta{constants::kVersion, config_hash(cfg), cfg.master_seed};
    json prov = json::array();
    for (const auto& kp : config_provenance(cfg))
      prov.push_back({{"key", kp.key}, {"value", kp.value}, {"source", kp.source}});
    write_json_file(out_dir / "provenance.json", json{{"entries", prov}}, meta);
    std::ofstream cfg_out(out_dir / "config.txt");
    cfg_out << emit_config(cfg);
  }

  const auto& table = target_table();
  ReproduceReport report;
  report.targets.resize(table.size());

  if (jobs < 1) jobs = 1;
  std::mutex mu;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= table.size()) return;
        i = next++;
      }
      report.targets[i] = run_one(cfg, table[i].first, table[i].second, out_dir);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const int n_threads = std::min<int>(jobs, static_cast<int>(table.size()));
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return report;
}

}  // namespace rydsim
