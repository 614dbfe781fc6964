#include "rydsim/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "rydsim/rng.hpp"

namespace rydsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct Entry {
  std::string key;
  std::string source;  // measured | derived | choice
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

void parse_double_into(double& target, const std::string& key, const std::string& v,
                       double lo, double hi) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    if (!(x >= lo && x <= hi)) {
      std::ostringstream msg;
      msg << key << ": value " << v << " outside [" << lo << ", " << hi << "]";
      throw ConfigError(msg.str());
    }
    target = x;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError(key + ": malformed number '" + v + "'");
  }
}

Entry dbl(const std::string& key, const std::string& source, double RunConfig::* mem,
          double lo, double hi) {
  return {key, source, [mem](const RunConfig& c) { return fmt(c.*mem); },
          [key, mem, lo, hi](RunConfig& c, const std::string& v) {
            parse_double_into(c.*mem, key, v, lo, hi);
          }};
}

template <typename Sub>
Entry dblsub(const std::string& key, const std::string& source,
             Sub RunConfig::* sub, double Sub::* mem, double lo, double hi) {
  return {key, source,
          [sub, mem](const RunConfig& c) { return fmt(c.*sub.*mem); },
          [key, sub, mem, lo, hi](RunConfig& c, const std::string& v) {
            parse_double_into(c.*sub.*mem, key, v, lo, hi);
          }};
}

Entry intsub(const std::string& key, const std::string& source,
             std::function<int&(RunConfig&)> ref, int lo, int hi) {
  return {key, source,
          [ref](const RunConfig& c) {
            return std::to_string(ref(const_cast<RunConfig&>(c)));
          },
          [key, ref, lo, hi](RunConfig& c, const std::string& v) {
            try {
              std::size_t used = 0;
              const long x = std::stol(v, &used);
              if (used != v.size()) throw std::invalid_argument("trailing");
              if (x < lo || x > hi) {
                std::ostringstream msg;
                msg << key << ": value " << v << " outside [" << lo << ", " << hi
                    << "]";
                throw ConfigError(msg.str());
              }
              ref(c) = static_cast<int>(x);
            } catch (const ConfigError&) {
              throw;
            } catch (const std::exception&) {
              throw ConfigError(key + ": malformed integer '" + v + "'");
            }
          }};
}

Entry boolsub(const std::string& key, const std::string& source,
              std::function<bool&(RunConfig&)> ref) {
  return {key, source,
          [ref](const RunConfig& c) {
            return ref(const_cast<RunConfig&>(c)) ? std::string("true")
                                                  : std::string("false");
          },
          [key, ref](RunConfig& c, const std::string& v) {
            if (v == "true" || v == "1")
              ref(c) = true;
            else if (v == "false" || v == "0")
              ref(c) = false;
            else
              throw ConfigError(key + ": expected true/false, got '" + v + "'");
          }};
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = [] {
    std::vector<Entry> e;
    e.push_back({"run.master_seed", "choice",
                 [](const RunConfig& c) { return std::to_string(c.master_seed); },
                 [](RunConfig& c, const std::string& v) {
                   try {
                     std::size_t used = 0;
                     c.master_seed = std::stoull(v, &used);
                     if (used != v.size()) throw std::invalid_argument("trailing");
                   } catch (const std::exception&) {
                     throw ConfigError("run.master_seed: malformed integer '" + v +
                                       "'");
                   }
                 }});
    e.push_back({"run.output_dir", "choice",
                 [](const RunConfig& c) { return c.output_dir; },
                 [](RunConfig& c, const std::string& v) {
                   if (v.empty())
                     throw ConfigError("run.output_dir: must not be empty");
                   c.output_dir = v;
                 }});

    e.push_back(dbl("interactions.c6_detection", "measured",
                    &RunConfig::c6_detection_MHz_um6, 1.0, 1e9));
    e.push_back(dbl("interactions.c3_detection", "measured",
                    &RunConfig::c3_detection_MHz_um3, 0.0, 1e7));
    e.push_back(dbl("interactions.c6_prep_parallel", "measured",
                    &RunConfig::c6_prep_parallel_MHz_um6, 1.0, 1e9));
    e.push_back(dbl("interactions.anisotropy_ratio", "measured",
                    &RunConfig::anisotropy_ratio, 1.0, 10.0));
    e.push_back(dbl("interactions.linewidth_3photon", "measured",
                    &RunConfig::linewidth_3photon_MHz, 0.01, 100.0));
    e.push_back(dbl("interactions.target_r_plus", "measured",
                    &RunConfig::target_r_plus_um, 1.0, 50.0));

    e.push_back(dblsub("ensemble.sigma_x", "measured", &RunConfig::cloud,
                       &CloudGeometry::sigma_x_um, 0.01, 1000.0));
    e.push_back(dblsub("ensemble.sigma_y", "measured", &RunConfig::cloud,
                       &CloudGeometry::sigma_y_um, 0.01, 1000.0));
    e.push_back(dblsub("ensemble.sigma_z", "measured", &RunConfig::cloud,
                       &CloudGeometry::sigma_z_um, 0.01, 1000.0));
    e.push_back(intsub("ensemble.n_atoms", "measured",
                       [](RunConfig& c) -> int& { return c.cloud.n_atoms; }, 1,
                       100000000));
    e.push_back(dblsub("ensemble.probe_angle_rad", "measured", &RunConfig::cloud,
                       &CloudGeometry::probe_angle_xy_rad, -3.15, 3.15));
    e.push_back(dblsub("ensemble.cross_section_reduction", "measured",
                       &RunConfig::cloud, &CloudGeometry::cross_section_reduction,
                       1e-6, 1.0));
    e.push_back(dblsub("ensemble.wavelength", "measured", &RunConfig::cloud,
                       &CloudGeometry::wavelength_um, 0.1, 10.0));

    e.push_back(dblsub("prep.delta_e", "measured", &RunConfig::prep,
                       &PrepConfig::delta_e_MHz, 0.0, 1e4));
    e.push_back(dblsub("prep.delta_r", "measured", &RunConfig::prep,
                       &PrepConfig::delta_r_MHz, 0.0, 1e4));
    e.push_back(intsub("prep.delta_r_sign", "choice",
                       [](RunConfig& c) -> int& { return c.prep.delta_r_sign; }, -1,
                       1));
    e.push_back({"prep.omega_p_peak", "choice",
                 [](const RunConfig& c) { return fmt(c.prep.probe_ramp.amplitude_MHz); },
                 [](RunConfig& c, const std::string& v) {
                   parse_double_into(c.prep.probe_ramp.amplitude_MHz,
                                     "prep.omega_p_peak", v, 0.0, 1e4);
                 }});
    e.push_back({"prep.omega_c_peak", "choice",
                 [](const RunConfig& c) {
                   return fmt(c.prep.control_ramp.amplitude_MHz);
                 },
                 [](RunConfig& c, const std::string& v) {
                   parse_double_into(c.prep.control_ramp.amplitude_MHz,
                                     "prep.omega_c_peak", v, 0.0, 1e4);
                 }});
    e.push_back({"prep.omega_mw_peak", "choice",
                 [](const RunConfig& c) { return fmt(c.prep.mw_ramp.amplitude_MHz); },
                 [](RunConfig& c, const std::string& v) {
                   parse_double_into(c.prep.mw_ramp.amplitude_MHz,
                                     "prep.omega_mw_peak", v, 0.0, 1e4);
                 }});
    e.push_back(dblsub("prep.duration", "measured", &RunConfig::prep,
                       &PrepConfig::duration_us, 0.01, 1000.0));
    e.push_back(dblsub("prep.three_photon_detuning", "choice", &RunConfig::prep,
                       &PrepConfig::three_photon_detuning_MHz, -1e3, 1e3));
    e.push_back(dblsub("prep.gamma_e", "choice", &RunConfig::prep,
                       &PrepConfig::gamma_e_MHz, 0.0, 1e3));
    e.push_back(boolsub("prep.mw_rampdown", "choice", [](RunConfig& c) -> bool& {
      return c.prep.mw_rampdown;
    }));

    e.push_back(dblsub("telegraph.r_high", "measured", &RunConfig::telegraph,
                       &TelegraphParams::r_high_per_us, 1e-3, 1e4));
    e.push_back(dblsub("telegraph.r_low", "derived", &RunConfig::telegraph,
                       &TelegraphParams::r_low_per_us, 0.0, 1e4));
    e.push_back(dblsub("telegraph.gamma_loss", "measured", &RunConfig::telegraph,
                       &TelegraphParams::gamma_loss_per_us, 0.0, 100.0));
    e.push_back(dblsub("telegraph.gamma_imp", "measured", &RunConfig::telegraph,
                       &TelegraphParams::gamma_imp_per_us, 0.0, 100.0));
    e.push_back(dblsub("telegraph.f_prep", "measured", &RunConfig::telegraph,
                       &TelegraphParams::f_prep, 0.0, 1.0));
    e.push_back(dblsub("telegraph.collection_eff", "measured", &RunConfig::telegraph,
                       &TelegraphParams::collection_eff, 1e-6, 1.0));
    e.push_back(dblsub("telegraph.detection_eff", "measured", &RunConfig::telegraph,
                       &TelegraphParams::detection_eff, 1e-6, 1.0));

    e.push_back(dblsub("window.t_start", "choice", &RunConfig::window,
                       &Window::t_start_us, 0.0, 1e4));
    e.push_back(dblsub("window.t_len", "measured", &RunConfig::window,
                       &Window::t_len_us, 1e-3, 1e4));

    e.push_back(dbl("readout.target_fd", "measured", &RunConfig::readout_target_fd,
                    0.5, 1.0));
    e.push_back(dbl("readout.sweep_beta", "derived", &RunConfig::sweep_beta, 0.0,
                    10.0));

    e.push_back(dblsub("qubit.omega", "measured", &RunConfig::rabi,
                       &RabiConfig::omega_MHz, 1e-3, 1e3));
    e.push_back(dblsub("qubit.mw_frequency", "measured", &RunConfig::rabi,
                       &RabiConfig::mw_frequency_MHz, 0.0, 1e6));
    e.push_back(dblsub("qubit.spectator_detuning", "measured", &RunConfig::rabi,
                       &RabiConfig::spectator_detuning_MHz, 0.0, 1e4));
    e.push_back(dblsub("qubit.spectator_suppression", "measured", &RunConfig::rabi,
                       &RabiConfig::spectator_suppression, 1.0, 1e4));
    e.push_back(dbl("qubit.b_field", "measured", &RunConfig::b_field_gauss, 0.0,
                    1e4));
    e.push_back(dblsub("ramsey.t2_star", "measured", &RunConfig::ramsey,
                       &RamseyConfig::t2_star_us, 1e-3, 1e6));
    e.push_back(dblsub("ramsey.amplitude", "measured", &RunConfig::ramsey,
                       &RamseyConfig::amplitude, 0.0, 1.0));
    e.push_back(dblsub("channel.f_prep", "measured", &RunConfig::channel,
                       &MeasurementChannel::f_prep, 0.0, 1.0));
    e.push_back(dblsub("channel.f_det", "measured", &RunConfig::channel,
                       &MeasurementChannel::f_det, 0.0, 1.0));

    auto shots_ref = [](int ShotCounts::* mem) {
      return [mem](RunConfig& c) -> int& { return c.shots.*mem; };
    };
    e.push_back(intsub("shots.histogram", "choice",
                       shots_ref(&ShotCounts::histogram), 100, 10000000));
    e.push_back(
        intsub("shots.trace", "choice", shots_ref(&ShotCounts::trace), 100,
               10000000));
    e.push_back(
        intsub("shots.joint", "choice", shots_ref(&ShotCounts::joint), 100,
               10000000));
    e.push_back(
        intsub("shots.table", "choice", shots_ref(&ShotCounts::table), 100,
               10000000));
    e.push_back(intsub("shots.rabi", "choice", shots_ref(&ShotCounts::rabi), 10,
                       10000000));
    e.push_back(intsub("shots.ramsey", "choice", shots_ref(&ShotCounts::ramsey), 10,
                       10000000));
    e.push_back(intsub("shots.washout_pairs", "choice",
                       shots_ref(&ShotCounts::washout_pairs), 1000, 10000000));
    e.push_back(intsub("shots.fit_per_window", "choice",
                       shots_ref(&ShotCounts::fit_per_window), 100, 10000000));
    e.push_back(intsub("shots.double_excitation_pairs", "choice",
                       shots_ref(&ShotCounts::double_excitation_pairs), 1000,
                       100000000));
    return e;
  }();
  return entries;
}

}  // namespace

PairModel RunConfig::detection_pair(Branch b) const {
  PairModel m;
  m.kind = PairKind::ExchangePlusVdw;
  m.c6_parallel_MHz_um6 = c6_detection_MHz_um6;
  m.c3_MHz_um3 = c3_detection_MHz_um3;
  m.anisotropy_ratio = 1.0;
  m.branch = b;
  return m;
}

PairModel RunConfig::prep_pair() const {
  PairModel m;
  m.kind = PairKind::VdwAnisotropic;
  m.c6_parallel_MHz_um6 = c6_prep_parallel_MHz_um6;
  m.c3_MHz_um3 = 0.0;
  m.anisotropy_ratio = anisotropy_ratio;
  m.branch = Branch::NotApplicable;
  return m;
}

BlockadeThreshold RunConfig::prep_threshold() const {
  return {linewidth_3photon_MHz, ThresholdConvention::FullLinewidth};
}

void RunConfig::validate() const {
  cloud.validate();
  prep.validate();
  telegraph.validate();
  window.validate();
  rabi.validate();
  ramsey.validate();
  detection_pair(Branch::Plus).validate();
  prep_pair().validate();
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value', got '" + line + "'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    bool found = false;
    for (const Entry& entry : registry()) {
      if (entry.key == key) {
        try {
          entry.set(cfg, value);
        } catch (const ConfigError& err) {
          throw ConfigError(err.what(), line_no);
        }
        found = true;
        break;
      }
    }
    if (!found) throw ConfigError("unknown key '" + key + "'", line_no);
  }
  try {
    cfg.validate();
  } catch (const std::exception& err) {
    throw ConfigError(std::string("invalid configuration: ") + err.what());
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string emit_config(const RunConfig& cfg) {
  std::ostringstream out;
  for (const Entry& entry : registry())
    out << entry.key << " = " << entry.get(cfg) << "\n";
  return out.str();
}

std::vector<KeyProvenance> config_provenance(const RunConfig& cfg) {
  std::vector<KeyProvenance> out;
  out.reserve(registry().size());
  for (const Entry& entry : registry())
    out.push_back({entry.key, entry.get(cfg), entry.source});
  return out;
}

std::string config_hash(const RunConfig& cfg) {
  const std::uint64_t h = fnv1a64(emit_config(cfg));
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rydsim
