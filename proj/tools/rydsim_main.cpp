// Command-line front end: every subcommand writes plot-ready CSV/JSON files
// under --out/<topic>/ and prints the JSON summary to stdout.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rydsim/config.hpp"
#include "rydsim/constants.hpp"
#include "rydsim/ensemble.hpp"
#include "rydsim/estimate.hpp"
#include "rydsim/readout.hpp"
#include "rydsim/report.hpp"
#include "rydsim/reproduce.hpp"
#include "rydsim/rng.hpp"

namespace {

using nlohmann::json;
using namespace rydsim;

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfigError = 2;

struct GlobalOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 1;
};

RunConfig load_config(const GlobalOpts& g) {
  RunConfig cfg = g.config_path.empty() ? RunConfig{} : parse_config_file(g.config_path);
  if (g.seed_set) cfg.master_seed = g.seed;
  return cfg;
}

void print_summary_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (in) std::cout << in.rdbuf();
}

int run_named_target(const GlobalOpts& g, const std::string& target,
                     const std::string& summary_file) {
  RunConfig cfg = load_config(g);
  TargetReport report = run_target(cfg, target, g.out_dir);
  if (!report.ok) {
    std::cerr << target << " failed: " << report.error << "\n";
    return kExitPartial;
  }
  print_summary_json(std::filesystem::path(g.out_dir) / target / summary_file);
  return kExitOk;
}

int cmd_ensemble(const GlobalOpts& g) {
  RunConfig cfg = load_config(g);
  const CloudGeometry& geom = cfg.cloud;
  const double frac = double_excitation_fraction(
      geom, cfg.prep_pair(), cfg.prep_threshold(),
      cfg.shots.double_excitation_pairs,
      seed_derive(cfg.master_seed, "double-excitation", 0));
  json j{{"d0_um", rms_pair_distance(geom)},
         {"od_peak", peak_optical_depth(geom)},
         {"mean_density_cm3", mean_density_cm3(geom)},
         {"double_excitation_fraction", frac}};
  std::filesystem::path dir = std::filesystem::path(g.out_dir) / "ensemble";
  std::filesystem::create_directories(dir);
  write_json_file(dir / "summary.json", j,
                  FileMeta{constants::kVersion, config_hash(cfg), cfg.master_seed});
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_readout_gain(const GlobalOpts& g) {
  RunConfig cfg = load_config(g);
  const GainResult gain = transistor_gain(cfg.telegraph, cfg.window);
  json j{{"gain_detected", gain.detected},
         {"gain_input_referred", gain.input_referred},
         {"window_us", cfg.window.t_len_us}};
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_readout_fit(const GlobalOpts& g, const std::vector<std::string>& hist_files,
                    bool impurity) {
  RunConfig cfg = load_config(g);
  std::vector<WindowHistogram> hists;
  for (const auto& file : hist_files) {
    WindowHistogram wh;
    std::ifstream sidecar(file + ".json");
    if (!sidecar) {
      std::cerr << "missing window sidecar " << file << ".json\n";
      return kExitConfigError;
    }
    json meta = json::parse(sidecar);
    wh.window.t_start_us = meta.at("t_start_us").get<double>();
    wh.window.t_len_us = meta.at("t_len_us").get<double>();

    std::ifstream in(file);
    if (!in) {
      std::cerr << "cannot open " << file << "\n";
      return kExitConfigError;
    }
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || std::isalpha(line[0])) continue;
      std::istringstream row(line);
      std::string count_s, occ_s;
      if (!std::getline(row, count_s, ',') || !std::getline(row, occ_s, ','))
        continue;
      const std::size_t n = std::stoul(count_s);
      const long occ = std::stol(occ_s);
      if (wh.counts.size() <= n) wh.counts.resize(n + 1, 0);
      wh.counts[n] = occ;
    }
    hists.push_back(std::move(wh));
  }

  TelegraphFit init;
  init.r_high_per_us = cfg.telegraph.r_high_per_us;
  init.r_low_per_us = cfg.telegraph.r_low_per_us;
  init.gamma_loss_per_us = cfg.telegraph.gamma_loss_per_us;
  init.gamma_imp_per_us = cfg.telegraph.gamma_imp_per_us;
  init.f_prep = cfg.telegraph.f_prep;

  json j;
  if (impurity) {
    if (hists.size() != 1) {
      std::cerr << "impurity fit expects exactly one histogram\n";
      return kExitConfigError;
    }
    const TelegraphFit fit = fit_impurity(hists[0], init);
    j = json{{"gamma_imp", fit.gamma_imp_per_us},
             {"r_high", fit.r_high_per_us},
             {"r_low", fit.r_low_per_us},
             {"log_likelihood", fit.log_likelihood},
             {"converged", fit.converged},
             {"flag", fit.flag}};
  } else {
    const TelegraphFit fit = fit_histograms(hists, init, /*prepared=*/true,
                                            seed_derive(cfg.master_seed, "cli-fit", 0));
    j = json{{"r_high", fit.r_high_per_us},
             {"r_low", fit.r_low_per_us},
             {"gamma_loss", fit.gamma_loss_per_us},
             {"f_prep", fit.f_prep},
             {"log_likelihood", fit.log_likelihood},
             {"converged", fit.converged},
             {"flag", fit.flag}};
  }
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_qubit_washout(const GlobalOpts& g) {
  RunConfig cfg = load_config(g);
  std::vector<double> grid;
  for (double t = 0.0; t <= 0.5 + 1e-12; t += 0.002) grid.push_back(t);
  std::filesystem::path dir = std::filesystem::path(g.out_dir) / "washout";
  std::filesystem::create_directories(dir);
  FileMeta meta{constants::kVersion, config_hash(cfg),
                seed_derive(cfg.master_seed, "washout", 0)};
  json j;
  for (Branch b : {Branch::Plus, Branch::Minus}) {
    const char* name = b == Branch::Plus ? "plus" : "minus";
    const WashoutCurve curve = two_excitation_contrast(
        cfg.detection_pair(b), cfg.cloud, cfg.rabi.omega_MHz, grid,
        cfg.shots.washout_pairs, meta.seed);
    CsvWriter csv(dir / (std::string("washout_") + name + ".csv"), meta,
                  {"t_us", "envelope", "signal"});
    for (std::size_t i = 0; i < curve.t_us.size(); ++i)
      csv.row(std::vector<double>{curve.t_us[i], curve.envelope[i],
                                  curve.signal[i]});
    const double v0 = std::abs(
        pair_potential(cfg.detection_pair(b), rms_pair_distance(cfg.cloud)));
    j[name] = {{"v_at_d0_MHz", v0}, {"timescale_ns", 1000.0 / v0}};
  }
  write_json_file(dir / "summary.json", j, meta);
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble-assisted Rydberg qubit simulator and inference toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--config", g.config_path, "Configuration file (key = value)");
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--jobs", g.jobs, "Worker threads for reproduce-all");
  auto* seed_opt = app.add_option("--seed", g.seed, "Master seed override");

  auto* blockade = app.add_subcommand("blockade", "Pair potentials and blockade radii");
  auto* ensemble = app.add_subcommand("ensemble", "Cloud geometry summary");

  auto* prep = app.add_subcommand("prep", "State preparation dynamics");
  prep->require_subcommand(1);
  auto* prep_scan_cmd = prep->add_subcommand("scan", "Three-photon lineshape scan");

  auto* detect = app.add_subcommand("detect", "Telegraph photon-count model");
  detect->require_subcommand(1);
  auto* det_hist = detect->add_subcommand("histogram", "Count distributions");
  auto* det_trace = detect->add_subcommand("trace", "Time-resolved rate");
  auto* det_joint = detect->add_subcommand("joint", "Two-window joint counts");

  auto* readout = app.add_subcommand("readout", "Discrimination and inference");
  readout->require_subcommand(1);
  auto* ro_fit = readout->add_subcommand("fit", "ML fit of windowed histograms");
  std::vector<std::string> hist_files;
  bool fit_impurity_flag = false;
  ro_fit->add_option("--hist", hist_files, "Histogram CSV (count,occurrences); window in <file>.json")
      ->required();
  ro_fit->add_flag("--impurity", fit_impurity_flag, "Unprepared-run impurity fit");
  auto* ro_table = readout->add_subcommand("table", "Repeated-measurement table");
  auto* ro_gain = readout->add_subcommand("gain", "Transistor gain");
  auto* ro_sweep = readout->add_subcommand("sweep", "Fidelity vs photon rate");

  auto* qubit = app.add_subcommand("qubit", "Coherent qubit dynamics");
  qubit->require_subcommand(1);
  auto* qb_rabi = qubit->add_subcommand("rabi", "Rabi oscillation and fit");
  auto* qb_ramsey = qubit->add_subcommand("ramsey", "Ramsey contrast and fit");
  auto* qb_washout = qubit->add_subcommand("washout", "Two-excitation dephasing");

  auto* config_cmd = app.add_subcommand("config", "Configuration utilities");
  config_cmd->require_subcommand(1);
  auto* cfg_emit = config_cmd->add_subcommand("emit-defaults", "Print default config");
  auto* cfg_prov = config_cmd->add_subcommand("provenance", "Print value provenance");

  auto* repro = app.add_subcommand("reproduce-all", "Regenerate every pipeline target");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }
  g.seed_set = seed_opt->count() > 0;

  try {
    if (blockade->parsed()) return run_named_target(g, "blockade", "summary.json");
    if (ensemble->parsed()) return cmd_ensemble(g);
    if (prep_scan_cmd->parsed()) return run_named_target(g, "prep_scan", "summary.json");
    if (det_hist->parsed()) return run_named_target(g, "histograms", "summary.json");
    if (det_trace->parsed()) return run_named_target(g, "rate_trace", "summary.json");
    if (det_joint->parsed()) return run_named_target(g, "joint_readout", "summary.json");
    if (ro_fit->parsed()) return cmd_readout_fit(g, hist_files, fit_impurity_flag);
    if (ro_table->parsed()) return run_named_target(g, "repeated_table", "summary.json");
    if (ro_gain->parsed()) return cmd_readout_gain(g);
    if (ro_sweep->parsed()) return run_named_target(g, "fidelity_vs_rate", "summary.json");
    if (qb_rabi->parsed()) return run_named_target(g, "rabi", "fit.json");
    if (qb_ramsey->parsed()) return run_named_target(g, "ramsey", "fit.json");
    if (qb_washout->parsed()) return cmd_qubit_washout(g);
    if (cfg_emit->parsed()) {
      std::cout << emit_defaults();
      return kExitOk;
    }
    if (cfg_prov->parsed()) {
      RunConfig cfg = load_config(g);
      json prov = json::array();
      for (const auto& kp : config_provenance(cfg))
        prov.push_back({{"key", kp.key}, {"value", kp.value}, {"source", kp.source}});
      std::cout << prov.dump(2) << "\n";
      return kExitOk;
    }
    if (repro->parsed()) {
      RunConfig cfg = load_config(g);
      const ReproduceReport report = reproduce_all(cfg, g.out_dir, g.jobs);
      for (const auto& t : report.targets)
        std::cout << (t.ok ? "ok   " : "FAIL ") << t.name
                  << (t.error.empty() ? "" : ": " + t.error) << "\n";
      return report.all_ok() ? kExitOk : kExitPartial;
    }
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitPartial;
  }
  return kExitOk;
}
