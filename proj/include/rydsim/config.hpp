#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rydsim/constants.hpp"
#include "rydsim/ensemble.hpp"
#include "rydsim/interactions.hpp"
#include "rydsim/prep.hpp"
#include "rydsim/qubit.hpp"
#include "rydsim/telegraph.hpp"

namespace rydsim {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg
                                    : msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Monte Carlo shot counts for the pipeline targets.
struct ShotCounts {
  int histogram = 100000;
  int trace = 20000;
  int joint = 20000;
  int table = 100000;
  int rabi = 150;
  int ramsey = 150;
  int washout_pairs = 20000;
  int fit_per_window = 2000;
  int double_excitation_pairs = 100000;
};

// Full run configuration with experiment-sourced defaults. Parsed from a flat
// "key = value" text file; unknown keys and out-of-range values are rejected.
struct RunConfig {
  std::uint64_t master_seed = 20260808ULL;
  std::string output_dir = "out";

  double c6_detection_MHz_um6 = constants::kC6DetectionMHzUm6;
  double c3_detection_MHz_um3 = constants::kC3DetectionMHzUm3;
  double c6_prep_parallel_MHz_um6 = constants::kC6PrepParallelMHzUm6;
  double anisotropy_ratio = constants::kBlockadeAspectRatio;
  double linewidth_3photon_MHz = constants::kThreePhotonLinewidthMHz;
  double target_r_plus_um = constants::kDetectionRadiusPlusUm;

  CloudGeometry cloud = CloudGeometry::defaults();
  PrepConfig prep = PrepConfig::defaults();
  TelegraphParams telegraph = TelegraphParams::defaults();
  Window window{0.0, constants::kDetectionWindowUs};
  double readout_target_fd = constants::kTargetDetectionFidelity;
  double sweep_beta = constants::kImpurityRatePerUs / constants::kTransparentRatePerUs;

  RabiConfig rabi;
  RamseyConfig ramsey = RamseyConfig::defaults();
  MeasurementChannel channel;
  double b_field_gauss = constants::kBiasFieldGauss;

  ShotCounts shots;

  PairModel detection_pair(Branch b) const;
  PairModel prep_pair() const;
  BlockadeThreshold prep_threshold() const;

  void validate() const;
};

// Parse a config file (empty file or missing keys fall back to defaults).
// Throws ConfigError with line/field diagnostics.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// Canonical emitted form: every key with its current value, one per line.
std::string emit_config(const RunConfig& cfg);
inline std::string emit_defaults() { return emit_config(RunConfig{}); }

// Per-key provenance: "measured" (taken from the modeled experiment),
// "derived" (calibrated or computed from measured values), or "choice"
// (tool decision). Rendered into provenance.json by the pipeline.
struct KeyProvenance {
  std::string key;
  std::string value;
  std::string source;
};
std::vector<KeyProvenance> config_provenance(const RunConfig& cfg);

// FNV-1a hash of the canonical emitted text, as fixed-width hex.
std::string config_hash(const RunConfig& cfg);

}  // namespace rydsim
