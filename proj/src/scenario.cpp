#include "isac/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace isac {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = s.find(sep, pos);
    if (next == std::string::npos) {
      out.push_back(s.substr(pos));
      break;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expect) {
  throw ConfigError("config: " + key + ": cannot parse '" + value + "' (" +
                    expect + ")");
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v.empty()) bad_value(key, raw, "expected a number");
  const char* begin = v.c_str();
  char* end = nullptr;
  const double x = std::strtod(begin, &end);
  if (end != begin + v.size()) bad_value(key, raw, "expected a number");
  if (!std::isfinite(x)) bad_value(key, raw, "expected a finite number");
  return x;
}

long long to_ll(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v.empty()) bad_value(key, raw, "expected an integer");
  const char* begin = v.c_str();
  char* end = nullptr;
  const long long x = std::strtoll(begin, &end, 10);
  if (end != begin + v.size()) bad_value(key, raw, "expected an integer");
  return x;
}

int to_int(const std::string& key, const std::string& raw) {
  const long long x = to_ll(key, raw);
  if (x < -2147483647LL || x > 2147483647LL) {
    bad_value(key, raw, "integer out of range");
  }
  return int(x);
}

std::uint64_t to_u64(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v.empty() || v[0] == '-') {
    bad_value(key, raw, "expected an unsigned integer");
  }
  const char* begin = v.c_str();
  char* end = nullptr;
  const unsigned long long x = std::strtoull(begin, &end, 10);
  if (end != begin + v.size()) {
    bad_value(key, raw, "expected an unsigned integer");
  }
  return std::uint64_t(x);
}

bool to_bool(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "true") return true;
  if (v == "false") return false;
  bad_value(key, raw, "expected true or false");
}

std::vector<double> to_double_list(const std::string& key,
                                   const std::string& raw) {
  std::vector<double> out;
  for (const std::string& part : split(raw, ',')) {
    out.push_back(to_double(key, part));
  }
  return out;
}

std::vector<int> to_int_list(const std::string& key, const std::string& raw) {
  std::vector<int> out;
  for (const std::string& part : split(raw, ',')) {
    out.push_back(to_int(key, part));
  }
  return out;
}

std::vector<SpaceAngle> to_angle_list(const std::string& key,
                                      const std::string& raw) {
  std::vector<SpaceAngle> out;
  for (const std::string& pair : split(raw, ';')) {
    const std::vector<std::string> xy = split(pair, ',');
    if (xy.size() != 2) {
      bad_value(key, raw, "expected 'x,y; x,y; ...' pairs");
    }
    out.push_back({to_double(key, xy[0]), to_double(key, xy[1])});
  }
  return out;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(v[i]);
  }
  return out;
}

std::string join_angles(const std::vector<SpaceAngle>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += "; ";
    out += format_double(v[i].x) + "," + format_double(v[i].y);
  }
  return out;
}

using Setter = std::function<void(ScenarioConfig&, const std::string&)>;

// One entry per config key; the map doubles as the unknown-key check.
const std::map<std::string, Setter>& key_table() {
  static const std::map<std::string, Setter> table = {
      {"schema_version",
       [](ScenarioConfig& c, const std::string& v) {
         c.schema_version = to_int("schema_version", v);
       }},
      {"scenario",
       [](ScenarioConfig& c, const std::string& v) { c.scenario = trim(v); }},
      {"n_x",
       [](ScenarioConfig& c, const std::string& v) {
         c.n_x = to_int("n_x", v);
       }},
      {"n_y",
       [](ScenarioConfig& c, const std::string& v) {
         c.n_y = to_int("n_y", v);
       }},
      {"spacing_m",
       [](ScenarioConfig& c, const std::string& v) {
         c.spacing_m = to_double("spacing_m", v);
       }},
      {"carrier_hz",
       [](ScenarioConfig& c, const std::string& v) {
         c.carrier_hz = to_double("carrier_hz", v);
       }},
      {"bandwidth_hz",
       [](ScenarioConfig& c, const std::string& v) {
         c.bandwidth_hz = to_double("bandwidth_hz", v);
       }},
      {"subcarriers",
       [](ScenarioConfig& c, const std::string& v) {
         c.subcarriers = to_int("subcarriers", v);
       }},
      {"num_uts",
       [](ScenarioConfig& c, const std::string& v) {
         c.num_uts = to_int("num_uts", v);
       }},
      {"rf_chains",
       [](ScenarioConfig& c, const std::string& v) {
         c.rf_chains = to_int("rf_chains", v);
       }},
      {"structure",
       [](ScenarioConfig& c, const std::string& v) { c.structure = trim(v); }},
      {"zeta",
       [](ScenarioConfig& c, const std::string& v) {
         c.zeta = to_double("zeta", v);
       }},
      {"squint_aware",
       [](ScenarioConfig& c, const std::string& v) {
         c.squint_aware = to_bool("squint_aware", v);
       }},
      {"rician_k_db",
       [](ScenarioConfig& c, const std::string& v) {
         c.rician_k_db = to_double("rician_k_db", v);
       }},
      {"gain_sat_db",
       [](ScenarioConfig& c, const std::string& v) {
         c.gain_sat_db = to_double("gain_sat_db", v);
       }},
      {"gain_ut_db",
       [](ScenarioConfig& c, const std::string& v) {
         c.gain_ut_db = to_double("gain_ut_db", v);
       }},
      {"distance_m",
       [](ScenarioConfig& c, const std::string& v) {
         c.distance_m = to_double("distance_m", v);
       }},
      {"temperature_k",
       [](ScenarioConfig& c, const std::string& v) {
         c.temperature_k = to_double("temperature_k", v);
       }},
      {"boltzmann_jk",
       [](ScenarioConfig& c, const std::string& v) {
         c.boltzmann_jk = to_double("boltzmann_jk", v);
       }},
      {"amp_inefficiency",
       [](ScenarioConfig& c, const std::string& v) {
         c.amp_inefficiency = to_double("amp_inefficiency", v);
       }},
      {"p_rfc_w",
       [](ScenarioConfig& c, const std::string& v) {
         c.p_rfc_w = to_double("p_rfc_w", v);
       }},
      {"p_lo_w",
       [](ScenarioConfig& c, const std::string& v) {
         c.p_lo_w = to_double("p_lo_w", v);
       }},
      {"p_bb_w",
       [](ScenarioConfig& c, const std::string& v) {
         c.p_bb_w = to_double("p_bb_w", v);
       }},
      {"p_al_w",
       [](ScenarioConfig& c, const std::string& v) {
         c.p_al_w = to_double("p_al_w", v);
       }},
      {"ut_angles",
       [](ScenarioConfig& c, const std::string& v) {
         const std::string t = trim(v);
         if (t == "auto") {
           c.ut_angles_auto = true;
           c.ut_angles.clear();
         } else {
           c.ut_angles_auto = false;
           c.ut_angles = to_angle_list("ut_angles", t);
         }
       }},
      {"target_angles",
       [](ScenarioConfig& c, const std::string& v) {
         c.target_angles = to_angle_list("target_angles", v);
       }},
      {"target_reflectivity",
       [](ScenarioConfig& c, const std::string& v) {
         c.target_reflectivity = to_double_list("target_reflectivity", v);
       }},
      {"p_fa",
       [](ScenarioConfig& c, const std::string& v) {
         c.p_fa = to_double("p_fa", v);
       }},
      {"power_dbw",
       [](ScenarioConfig& c, const std::string& v) {
         c.power_dbw = to_double("power_dbw", v);
       }},
      {"power_dbw_min",
       [](ScenarioConfig& c, const std::string& v) {
         c.power_dbw_min = to_double("power_dbw_min", v);
       }},
      {"power_dbw_max",
       [](ScenarioConfig& c, const std::string& v) {
         c.power_dbw_max = to_double("power_dbw_max", v);
       }},
      {"power_dbw_step",
       [](ScenarioConfig& c, const std::string& v) {
         c.power_dbw_step = to_double("power_dbw_step", v);
       }},
      {"antenna_side_list",
       [](ScenarioConfig& c, const std::string& v) {
         c.antenna_side_list = to_int_list("antenna_side_list", v);
       }},
      {"bandwidth_list_hz",
       [](ScenarioConfig& c, const std::string& v) {
         c.bandwidth_list_hz = to_double_list("bandwidth_list_hz", v);
       }},
      {"mc_trials",
       [](ScenarioConfig& c, const std::string& v) {
         c.mc_trials = to_int("mc_trials", v);
       }},
      {"num_drops",
       [](ScenarioConfig& c, const std::string& v) {
         c.num_drops = to_int("num_drops", v);
       }},
      {"grid_points",
       [](ScenarioConfig& c, const std::string& v) {
         c.grid_points = to_int("grid_points", v);
       }},
      {"cut_points",
       [](ScenarioConfig& c, const std::string& v) {
         c.cut_points = to_int("cut_points", v);
       }},
      {"cut_axis",
       [](ScenarioConfig& c, const std::string& v) { c.cut_axis = trim(v); }},
      {"seed",
       [](ScenarioConfig& c, const std::string& v) {
         c.seed = to_u64("seed", v);
       }},
      {"output_dir",
       [](ScenarioConfig& c, const std::string& v) {
         c.output_dir = trim(v);
       }},
      {"format",
       [](ScenarioConfig& c, const std::string& v) { c.format = trim(v); }},
      {"solver_outer_tol",
       [](ScenarioConfig& c, const std::string& v) {
         c.solver_outer_tol = to_double("solver_outer_tol", v);
       }},
      {"solver_max_outer",
       [](ScenarioConfig& c, const std::string& v) {
         c.solver_max_outer = to_int("solver_max_outer", v);
       }},
      {"solver_inner_rel_tol",
       [](ScenarioConfig& c, const std::string& v) {
         c.solver_inner_rel_tol = to_double("solver_inner_rel_tol", v);
       }},
      {"solver_max_inner",
       [](ScenarioConfig& c, const std::string& v) {
         c.solver_max_inner = to_int("solver_max_inner", v);
       }},
      {"hybrid_rel_tol",
       [](ScenarioConfig& c, const std::string& v) {
         c.hybrid_rel_tol = to_double("hybrid_rel_tol", v);
       }},
      {"hybrid_max_cycles",
       [](ScenarioConfig& c, const std::string& v) {
         c.hybrid_max_cycles = to_int("hybrid_max_cycles", v);
       }},
  };
  return table;
}

void require(bool ok, const std::string& field, const std::string& msg) {
  if (!ok) throw ConfigError("config: " + field + ": " + msg);
}

std::string angle_bounds_msg(const SpaceAngle& a) {
  return "(" + format_double(a.x) + "," + format_double(a.y) +
         ") has a component outside [-1, 1]";
}

}  // namespace

ScenarioConfig parse_config(const std::string& text,
                            const ScenarioConfig& base) {
  ScenarioConfig cfg = base;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": missing key before '='");
    }
    const auto it = key_table().find(key);
    if (it == key_table().end()) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": unknown key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
    }
    it->second(cfg, value);
  }
  return cfg;
}

std::string serialize_config(const ScenarioConfig& c) {
  std::string out;
  const auto emit = [&out](const std::string& key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += "\n";
  };
  emit("schema_version", std::to_string(c.schema_version));
  emit("scenario", c.scenario);
  emit("n_x", std::to_string(c.n_x));
  emit("n_y", std::to_string(c.n_y));
  emit("spacing_m", format_double(c.spacing_m));
  emit("carrier_hz", format_double(c.carrier_hz));
  emit("bandwidth_hz", format_double(c.bandwidth_hz));
  emit("subcarriers", std::to_string(c.subcarriers));
  emit("num_uts", std::to_string(c.num_uts));
  emit("rf_chains", std::to_string(c.rf_chains));
  emit("structure", c.structure);
  emit("zeta", format_double(c.zeta));
  emit("squint_aware", c.squint_aware ? "true" : "false");
  emit("rician_k_db", format_double(c.rician_k_db));
  emit("gain_sat_db", format_double(c.gain_sat_db));
  emit("gain_ut_db", format_double(c.gain_ut_db));
  emit("distance_m", format_double(c.distance_m));
  emit("temperature_k", format_double(c.temperature_k));
  emit("boltzmann_jk", format_double(c.boltzmann_jk));
  emit("amp_inefficiency", format_double(c.amp_inefficiency));
  emit("p_rfc_w", format_double(c.p_rfc_w));
  emit("p_lo_w", format_double(c.p_lo_w));
  emit("p_bb_w", format_double(c.p_bb_w));
  emit("p_al_w", format_double(c.p_al_w));
  emit("ut_angles", c.ut_angles_auto ? "auto" : join_angles(c.ut_angles));
  emit("target_angles", join_angles(c.target_angles));
  emit("target_reflectivity", join_doubles(c.target_reflectivity));
  emit("p_fa", format_double(c.p_fa));
  emit("power_dbw", format_double(c.power_dbw));
  emit("power_dbw_min", format_double(c.power_dbw_min));
  emit("power_dbw_max", format_double(c.power_dbw_max));
  emit("power_dbw_step", format_double(c.power_dbw_step));
  emit("antenna_side_list", join_ints(c.antenna_side_list));
  emit("bandwidth_list_hz", join_doubles(c.bandwidth_list_hz));
  emit("mc_trials", std::to_string(c.mc_trials));
  emit("num_drops", std::to_string(c.num_drops));
  emit("grid_points", std::to_string(c.grid_points));
  emit("cut_points", std::to_string(c.cut_points));
  emit("cut_axis", c.cut_axis);
  emit("seed", std::to_string(c.seed));
  emit("output_dir", c.output_dir);
  emit("format", c.format);
  emit("solver_outer_tol", format_double(c.solver_outer_tol));
  emit("solver_max_outer", std::to_string(c.solver_max_outer));
  emit("solver_inner_rel_tol", format_double(c.solver_inner_rel_tol));
  emit("solver_max_inner", std::to_string(c.solver_max_inner));
  emit("hybrid_rel_tol", format_double(c.hybrid_rel_tol));
  emit("hybrid_max_cycles", std::to_string(c.hybrid_max_cycles));
  return out;
}

std::uint64_t config_hash(const ScenarioConfig& cfg) {
  // The hash identifies the experiment, not where its files land: the same
  // run written to two directories must keep one identity.
  ScenarioConfig canon = cfg;
  canon.output_dir = "out";
  const std::string text = serialize_config(canon);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char byte : text) {
    h ^= byte;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash_hex(const ScenarioConfig& cfg) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx",
                (unsigned long long)config_hash(cfg));
  return std::string(buf);
}

void validate_config(const ScenarioConfig& c) {
  require(c.schema_version == 1, "schema_version",
          "unsupported version " + std::to_string(c.schema_version) +
              " (supported: 1)");
  {
    const auto names = preset_names();
    const bool known =
        std::find(names.begin(), names.end(), c.scenario) != names.end();
    std::string all;
    for (const auto& n : names) {
      if (!all.empty()) all += ", ";
      all += n;
    }
    require(known, "scenario", "unknown scenario '" + c.scenario +
                                   "' (expected one of: " + all + ")");
  }
  require(c.n_x >= 1, "n_x", "must be >= 1");
  require(c.n_y >= 1, "n_y", "must be >= 1");
  require(c.spacing_m >= 0.0, "spacing_m", "must be >= 0 (0 = half-wave)");
  require(c.carrier_hz > 0.0, "carrier_hz", "must be > 0");
  require(c.bandwidth_hz > 0.0, "bandwidth_hz", "must be > 0");
  require(c.subcarriers >= 1, "subcarriers", "must be >= 1");
  const long long n_t = (long long)c.n_x * c.n_y;
  require(c.num_uts >= 1, "num_uts", "must be >= 1");
  require(c.rf_chains >= c.num_uts, "rf_chains",
          "needs at least one RF chain per UT (num_uts = " +
              std::to_string(c.num_uts) + ")");
  require(c.rf_chains <= n_t, "rf_chains",
          "cannot exceed the antenna count " + std::to_string(n_t));
  require(c.structure == "fully-digital" || c.structure == "fully-connected" ||
              c.structure == "partially-connected",
          "structure",
          "expected fully-digital, fully-connected, or partially-connected");
  if (c.structure == "partially-connected") {
    require(n_t % c.rf_chains == 0, "rf_chains",
            "partially-connected needs the antenna count " +
                std::to_string(n_t) + " divisible by rf_chains");
  }
  require(c.zeta >= 0.0 && c.zeta <= 1.0, "zeta", "must lie in [0, 1]");
  require(c.distance_m > 0.0, "distance_m", "must be > 0");
  require(c.temperature_k > 0.0, "temperature_k", "must be > 0");
  require(c.boltzmann_jk > 0.0, "boltzmann_jk", "must be > 0");
  require(c.amp_inefficiency > 0.0, "amp_inefficiency", "must be > 0");
  require(c.p_rfc_w >= 0.0, "p_rfc_w", "must be >= 0");
  require(c.p_lo_w >= 0.0, "p_lo_w", "must be >= 0");
  require(c.p_bb_w >= 0.0, "p_bb_w", "must be >= 0");
  require(c.p_al_w >= 0.0, "p_al_w", "must be >= 0");
  if (!c.ut_angles_auto) {
    require(int(c.ut_angles.size()) == c.num_uts, "ut_angles",
            "expected " + std::to_string(c.num_uts) + " pairs, got " +
                std::to_string(c.ut_angles.size()));
    for (const auto& a : c.ut_angles) {
      require(std::abs(a.x) <= 1.0 && std::abs(a.y) <= 1.0, "ut_angles",
              angle_bounds_msg(a));
    }
  }
  require(!c.target_angles.empty(), "target_angles",
          "at least one target required");
  require(c.target_angles.size() == c.target_reflectivity.size(),
          "target_reflectivity",
          "expected one value per target (" +
              std::to_string(c.target_angles.size()) + ")");
  for (const auto& a : c.target_angles) {
    require(std::abs(a.x) <= 1.0 && std::abs(a.y) <= 1.0, "target_angles",
            angle_bounds_msg(a));
  }
  for (double r : c.target_reflectivity) {
    require(r >= 0.0, "target_reflectivity", "must be >= 0");
  }
  const int p_r = int(c.target_angles.size());
  require(p_r <= c.num_uts, "target_angles",
          "target count must not exceed num_uts (" +
              std::to_string(c.num_uts) + ")");
  require(n_t % p_r == 0, "target_angles",
          "antenna count " + std::to_string(n_t) +
              " must be divisible by the target count " +
              std::to_string(p_r));
  require(c.p_fa > 0.0 && c.p_fa <= 1.0, "p_fa", "must lie in (0, 1]");
  require(std::isfinite(c.power_dbw), "power_dbw", "must be finite");
  require(c.power_dbw_step > 0.0, "power_dbw_step", "must be > 0");
  require(c.power_dbw_max >= c.power_dbw_min, "power_dbw_max",
          "must be >= power_dbw_min");
  require((c.power_dbw_max - c.power_dbw_min) / c.power_dbw_step <= 10000.0,
          "power_dbw_step", "sweep would exceed 10000 points");
  require(!c.antenna_side_list.empty(), "antenna_side_list",
          "at least one entry required");
  for (int side : c.antenna_side_list) {
    require(side >= 1, "antenna_side_list", "sides must be >= 1");
    // Coupling with rf_chains and targets only matters when this axis is
    // actually swept; other scenarios ignore the list entirely.
    if (c.scenario != "ee-vs-antennas") continue;
    const long long n = (long long)side * side;
    require(c.rf_chains <= n, "antenna_side_list",
            "side " + std::to_string(side) + " gives " + std::to_string(n) +
                " antennas, fewer than rf_chains");
    require(n % p_r == 0, "antenna_side_list",
            "side " + std::to_string(side) + " gives " + std::to_string(n) +
                " antennas, not divisible by the target count " +
                std::to_string(p_r));
    if (c.structure == "partially-connected") {
      require(n % c.rf_chains == 0, "antenna_side_list",
              "side " + std::to_string(side) + " gives " + std::to_string(n) +
                  " antennas, not divisible by rf_chains");
    }
  }
  require(!c.bandwidth_list_hz.empty(), "bandwidth_list_hz",
          "at least one entry required");
  for (double b : c.bandwidth_list_hz) {
    require(b > 0.0, "bandwidth_list_hz", "bandwidths must be > 0");
  }
  require(c.mc_trials >= 2, "mc_trials",
          "must be >= 2 (standard error needs at least two trials)");
  require(c.num_drops >= 1, "num_drops", "must be >= 1");
  require(c.grid_points >= 2, "grid_points", "must be >= 2");
  require(c.cut_points >= 3, "cut_points", "must be >= 3");
  require(c.cut_axis == "x" || c.cut_axis == "y", "cut_axis",
          "expected x or y");
  require(!c.output_dir.empty(), "output_dir", "must not be empty");
  require(c.format == "csv" || c.format == "json", "format",
          "expected csv or json");
  require(c.solver_outer_tol > 0.0, "solver_outer_tol", "must be > 0");
  require(c.solver_max_outer >= 1, "solver_max_outer", "must be >= 1");
  require(c.solver_inner_rel_tol > 0.0, "solver_inner_rel_tol",
          "must be > 0");
  require(c.solver_max_inner >= 1, "solver_max_inner", "must be >= 1");
  require(c.hybrid_rel_tol > 0.0, "hybrid_rel_tol", "must be > 0");
  require(c.hybrid_max_cycles >= 1, "hybrid_max_cycles", "must be >= 1");
}

}  // namespace isac
