#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "isac/channel.hpp"

namespace isac {

// Raised for malformed or invalid scenario configuration; the message names
// the offending key or line.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Full description of one simulation run. Serialized as a flat key = value
// text document with a versioned schema; every field has a desk-scale
// default so partial documents are valid overrides.
struct ScenarioConfig {
  int schema_version = 1;

  // Flow selection: which experiment to run (also fixes the sweep axis).
  std::string scenario = "ee-vs-power";

  // Transmit array and OFDM plan.
  int n_x = 8;
  int n_y = 8;
  double spacing_m = 0.0;  // 0 selects half the carrier wavelength
  double carrier_hz = 20.0e9;
  double bandwidth_hz = 800.0e6;
  int subcarriers = 8;

  // Users, RF chains, precoder structure.
  int num_uts = 4;
  int rf_chains = 4;
  // fully-digital | fully-connected | partially-connected
  std::string structure = "fully-digital";
  double zeta = 0.5;
  bool squint_aware = true;

  // Link budget and channel statistics.
  double rician_k_db = 12.0;
  double gain_sat_db = 20.0;
  double gain_ut_db = 20.0;
  double distance_m = 1.0e6;
  double temperature_k = 300.0;
  double boltzmann_jk = 1.38e-23;

  // Power consumption model.
  double amp_inefficiency = 2.0;
  double p_rfc_w = 0.338;
  double p_lo_w = 0.005;
  double p_bb_w = 0.2;
  double p_al_w = 0.0;

  // UT directions: drawn uniformly on [-1, 1]^2 per drop, or fixed.
  bool ut_angles_auto = true;
  std::vector<SpaceAngle> ut_angles;

  // Sensing targets. The desk-scale reflectivity is chosen so the detection
  // knee falls inside the preset power windows at the small default array;
  // the published-scale value is restored by apply_paper_scale.
  std::vector<SpaceAngle> target_angles = {{-0.3, 0.7}, {0.6, -0.2}};
  std::vector<double> target_reflectivity = {5.0e-5, 5.0e-5};
  double p_fa = 1.0e-7;

  // Sweep axes.
  double power_dbw = 10.0;
  double power_dbw_min = -20.0;
  double power_dbw_max = 30.0;
  double power_dbw_step = 5.0;
  std::vector<int> antenna_side_list = {4, 6, 8, 12};
  std::vector<double> bandwidth_list_hz = {100.0e6, 400.0e6, 800.0e6};

  // Evaluation sizes.
  int mc_trials = 2000;
  int num_drops = 1;
  int grid_points = 61;
  int cut_points = 1001;
  std::string cut_axis = "x";  // x | y

  // Reproducibility and output.
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::string format = "csv";  // csv | json

  // Solver controls.
  double solver_outer_tol = 1.0e-4;
  int solver_max_outer = 30;
  double solver_inner_rel_tol = 1.0e-6;
  int solver_max_inner = 200;
  double hybrid_rel_tol = 1.0e-6;
  int hybrid_max_cycles = 200;
};

// Parse a key = value document ('#' comments, blank lines allowed) on top
// of the given base. Unknown and duplicate keys are errors. Values are not
// cross-validated here; call validate_config afterwards.
ScenarioConfig parse_config(const std::string& text,
                            const ScenarioConfig& base = {});

// Canonical text form: every key once, fixed order, shortest round-trip
// number formatting. parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const ScenarioConfig& cfg);

// FNV-1a 64-bit hash of the canonical text, and its 0x-prefixed hex form.
// output_dir is excluded: relocating a run does not change its identity.
std::uint64_t config_hash(const ScenarioConfig& cfg);
std::string config_hash_hex(const ScenarioConfig& cfg);

// Cross-field validation; throws ConfigError naming the offending field.
void validate_config(const ScenarioConfig& cfg);

// Named experiment setups at desk scale. Throws ConfigError for unknown
// names. preset_names lists them; preset_summary is a one-line description.
ScenarioConfig preset(const std::string& name);
std::vector<std::string> preset_names();
std::string preset_summary(const std::string& name);

// Rescale a configuration to the published system size (large array, 40
// subcarriers, 16 UTs, four targets, 3 dB antenna gains). Runs take far
// longer at this size.
void apply_paper_scale(ScenarioConfig& cfg);

// Shortest round-trip decimal form of a double (used by the serializer and
// the CSV writers so identical runs emit identical bytes).
std::string format_double(double v);

}  // namespace isac
