#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isac/scenario.hpp"

namespace isac {

// What a run produced. Data files land in cfg.output_dir together with a
// manifest.json holding the resolved configuration, its hash, the seed, and
// per-file summaries.
struct RunReport {
  std::vector<std::string> files;  // data file paths as written
  std::string manifest_path;
  std::uint64_t hash = 0;
  bool all_converged = true;
  std::vector<std::string> warnings;  // one line per non-converged point
};

// Execute the experiment selected by cfg.scenario and write its outputs.
// The config must already pass validate_config. Deterministic for a fixed
// config: identical runs produce byte-identical files.
RunReport run_scenario(const ScenarioConfig& cfg);

}  // namespace isac
