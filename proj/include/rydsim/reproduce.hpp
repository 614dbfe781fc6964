#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rydsim/config.hpp"

namespace rydsim {

struct TargetReport {
  std::string name;
  bool ok = false;
  std::string error;
};

struct ReproduceReport {
  std::vector<TargetReport> targets;
  bool all_ok() const;
};

// Names of the pipeline targets, in emission order.
const std::vector<std::string>& reproduce_target_names();

// Run every pipeline target, each into out_dir/<name>/. Targets draw their
// seeds through seed_derive(master_seed, target name, index), so results are
// independent of scheduling and `jobs`. A failing target is isolated; the
// report lists it and completed targets are kept.
ReproduceReport reproduce_all(const RunConfig& cfg,
                              const std::filesystem::path& out_dir, int jobs = 1);

// Run a single named target (used by the per-topic CLI subcommands).
TargetReport run_target(const RunConfig& cfg, const std::string& name,
                        const std::filesystem::path& out_dir);

}  // namespace rydsim
