// Config parsing/serialization, validation diagnostics, presets, and
// end-to-end reproducibility of the scenario runner (byte-identical
// reruns, sweep-prefix stability, manifest round-trip).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "isac/run_scenario.hpp"
#include "isac/scenario.hpp"

using namespace isac;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("isac_test_" + tag);
  fs::remove_all(dir);
  return dir;
}

// Minimal sweep config that runs in milliseconds.
ScenarioConfig tiny_power_sweep() {
  ScenarioConfig cfg = preset("ee-vs-power");
  cfg.n_x = 4;
  cfg.n_y = 4;
  cfg.subcarriers = 2;
  cfg.num_uts = 2;
  cfg.rf_chains = 2;
  cfg.mc_trials = 64;
  cfg.power_dbw_min = -5.0;
  cfg.power_dbw_max = 10.0;
  cfg.power_dbw_step = 5.0;
  cfg.seed = 31;
  return cfg;
}

struct Csv {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Csv parse_csv(const std::string& text) {
  Csv out;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      out.comments.push_back(line);
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!have_header) {
      out.header = cells;
      have_header = true;
    } else {
      out.rows.push_back(cells);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("parse: comments, whitespace, and every scalar type") {
  const std::string text =
      "# leading comment\n"
      "scenario = ee-vs-power\n"
      "n_x = 6   # trailing comment\n"
      "zeta = 0.25\n"
      "squint_aware = false\n"
      "seed = 12345\n"
      "target_angles = -0.1,0.2; 0.3,-0.4\n"
      "\n"
      "output_dir = out/run1\n";
  const ScenarioConfig cfg = parse_config(text);
  CHECK(cfg.scenario == "ee-vs-power");
  CHECK(cfg.n_x == 6);
  CHECK(cfg.zeta == 0.25);
  CHECK_FALSE(cfg.squint_aware);
  CHECK(cfg.seed == 12345);
  REQUIRE(cfg.target_angles.size() == 2);
  CHECK(cfg.target_angles[1].x == 0.3);
  CHECK(cfg.output_dir == "out/run1");
}

TEST_CASE("parse: diagnostics carry line numbers and key names") {
  try {
    parse_config("n_x = 4\nbogus_key = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bogus_key") != std::string::npos);
    CHECK(msg.find("2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("n_x = 4\nn_x = 5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("n_x = not_a_number\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("squint_aware = yes\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("seed = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("just some words\n"), ConfigError);
}

TEST_CASE("serialize / parse round trip preserves the hash") {
  ScenarioConfig cfg = preset("pd-vs-power");
  cfg.n_x = 6;
  cfg.zeta = 0.125;
  cfg.ut_angles_auto = false;
  cfg.ut_angles = {{0.1, 0.2}, {-0.3, 0.4}, {0.5, -0.6}, {0.7, 0.8}};
  cfg.seed = 99;
  const std::string text = serialize_config(cfg);
  const ScenarioConfig back = parse_config(text);
  CHECK(config_hash(cfg) == config_hash(back));
  CHECK(serialize_config(back) == text);
  CHECK(config_hash_hex(cfg).substr(0, 2) == "0x");
}

TEST_CASE("hash is sensitive to every changed field") {
  const ScenarioConfig base = preset("ee-vs-power");
  ScenarioConfig a = base;
  a.seed += 1;
  CHECK(config_hash(a) != config_hash(base));
  ScenarioConfig b = base;
  b.zeta += 0.001;
  CHECK(config_hash(b) != config_hash(base));
  ScenarioConfig c = base;
  c.format = "json";
  CHECK(config_hash(c) != config_hash(base));
}

TEST_CASE("validation diagnostics name the offending field") {
  ScenarioConfig cfg = preset("ee-vs-power");
  cfg.num_uts = 10;
  cfg.rf_chains = 4;
  try {
    validate_config(cfg);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("rf_chains") != std::string::npos);
  }

  ScenarioConfig pc = preset("beampattern-pc");
  pc.n_x = 5;
  pc.n_y = 5;  // 25 antennas not divisible by 4 chains
  CHECK_THROWS_AS(validate_config(pc), ConfigError);

  ScenarioConfig bad = preset("ee-vs-power");
  bad.scenario = "not-a-scenario";
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  ScenarioConfig fmt = preset("ee-vs-power");
  fmt.format = "xml";
  CHECK_THROWS_AS(validate_config(fmt), ConfigError);

  ScenarioConfig angle = preset("squint-cut");
  angle.target_angles = {{1.2, 0.0}};
  angle.target_reflectivity = {1e-5};
  CHECK_THROWS_AS(validate_config(angle), ConfigError);
}

TEST_CASE("presets: every listed name builds a valid config") {
  const auto names = preset_names();
  CHECK(names.size() == 8);
  for (const std::string& name : names) {
    const ScenarioConfig cfg = preset(name);
    CHECK(cfg.scenario == name);
    CHECK_NOTHROW(validate_config(cfg));
    CHECK_FALSE(preset_summary(name).empty());
    // Scaled-up variants stay valid too.
    ScenarioConfig big = cfg;
    apply_paper_scale(big);
    CHECK_NOTHROW(validate_config(big));
  }
  CHECK_THROWS_AS(preset("nope"), ConfigError);
}

TEST_CASE("paper scale raises the problem size") {
  ScenarioConfig cfg = preset("ee-vs-power");
  apply_paper_scale(cfg);
  CHECK(cfg.n_x * cfg.n_y > 256);
  CHECK(cfg.subcarriers == 40);
  CHECK(cfg.num_uts == 16);
  CHECK(cfg.gain_sat_db == 3.0);
  CHECK(cfg.distance_m == 1.0e6);
  CHECK(cfg.target_angles.size() == 4);

  ScenarioConfig cut = preset("squint-cut");
  apply_paper_scale(cut);
  CHECK(cut.target_angles.size() == 1);  // single-target study keeps focus
}

TEST_CASE("format_double: shortest round-trip forms") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-2.5) == "-2.5");
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(8.0e8) == "8e+08");
  const double tricky = 0.30000000000000004;
  CHECK(std::stod(format_double(tricky)) == tricky);
}

TEST_CASE("runner: reruns are byte-identical") {
  ScenarioConfig cfg = tiny_power_sweep();
  const fs::path dir1 = fresh_dir("det1");
  const fs::path dir2 = fresh_dir("det2");
  cfg.output_dir = dir1.string();
  const RunReport r1 = run_scenario(cfg);
  cfg.output_dir = dir2.string();
  const RunReport r2 = run_scenario(cfg);
  REQUIRE(r1.files.size() == r2.files.size());
  CHECK(r1.hash == r2.hash);
  for (std::size_t i = 0; i < r1.files.size(); ++i) {
    CHECK(fs::path(r1.files[i]).filename() ==
          fs::path(r2.files[i]).filename());
    CHECK(slurp(r1.files[i]) == slurp(r2.files[i]));
  }
  CHECK(slurp(r1.manifest_path) == slurp(r2.manifest_path));
  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

TEST_CASE("runner: extending a sweep never changes earlier points") {
  ScenarioConfig shorter = tiny_power_sweep();
  shorter.power_dbw_max = 0.0;
  ScenarioConfig longer = tiny_power_sweep();
  longer.power_dbw_max = 10.0;

  const fs::path dir1 = fresh_dir("prefix1");
  const fs::path dir2 = fresh_dir("prefix2");
  shorter.output_dir = dir1.string();
  longer.output_dir = dir2.string();
  const RunReport r1 = run_scenario(shorter);
  const RunReport r2 = run_scenario(longer);

  const Csv a = parse_csv(slurp(r1.files[0]));
  const Csv b = parse_csv(slurp(r2.files[0]));
  REQUIRE(a.header == b.header);
  REQUIRE(a.rows.size() == 2);
  REQUIRE(b.rows.size() == 4);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i] == b.rows[i]);
  }
  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

TEST_CASE("runner: manifest lists outputs and round-trips the config") {
  ScenarioConfig cfg = tiny_power_sweep();
  const fs::path dir = fresh_dir("manifest");
  cfg.output_dir = dir.string();
  const RunReport rep = run_scenario(cfg);

  const nlohmann::json manifest =
      nlohmann::json::parse(slurp(rep.manifest_path));
  CHECK(manifest.at("scenario") == "ee-vs-power");
  CHECK(manifest.at("config_hash") == config_hash_hex(cfg));
  CHECK(manifest.at("seed") == 31);
  CHECK(manifest.at("all_converged").is_boolean());
  REQUIRE(manifest.at("outputs").is_array());
  CHECK(manifest.at("outputs").size() == rep.files.size());
  for (const auto& entry : manifest.at("outputs")) {
    CHECK(entry.at("rows").get<int>() > 0);
    CHECK(entry.at("columns").is_array());
  }
  const ScenarioConfig back =
      parse_config(manifest.at("resolved_config").get<std::string>());
  CHECK(config_hash(back) == config_hash(cfg));
  fs::remove_all(dir);
}

TEST_CASE("runner: json output carries the same table") {
  ScenarioConfig cfg = tiny_power_sweep();
  cfg.format = "json";
  const fs::path dir = fresh_dir("jsonfmt");
  cfg.output_dir = dir.string();
  const RunReport rep = run_scenario(cfg);
  REQUIRE(!rep.files.empty());
  const nlohmann::json table = nlohmann::json::parse(slurp(rep.files[0]));
  CHECK(table.at("scenario") == "ee-vs-power");
  CHECK(table.at("config_hash") == config_hash_hex(cfg));
  REQUIRE(table.at("columns").is_array());
  CHECK(table.at("columns").size() >= 5);
  CHECK(table.at("rows").size() == 4);
  fs::remove_all(dir);
}

TEST_CASE("runner: invalid configuration is rejected before any output") {
  ScenarioConfig cfg = tiny_power_sweep();
  cfg.num_uts = 3;
  cfg.rf_chains = 2;
  const fs::path dir = fresh_dir("reject");
  cfg.output_dir = dir.string();
  CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
  CHECK_FALSE(fs::exists(dir / "manifest.json"));
  fs::remove_all(dir);
}

TEST_CASE("runner: per-drop averaging changes values, not the schema") {
  ScenarioConfig one = tiny_power_sweep();
  ScenarioConfig three = tiny_power_sweep();
  three.num_drops = 3;
  const fs::path dir1 = fresh_dir("drops1");
  const fs::path dir3 = fresh_dir("drops3");
  one.output_dir = dir1.string();
  three.output_dir = dir3.string();
  const Csv a = parse_csv(slurp(run_scenario(one).files[0]));
  const Csv b = parse_csv(slurp(run_scenario(three).files[0]));
  CHECK(a.header == b.header);
  CHECK(a.rows.size() == b.rows.size());
  fs::remove_all(dir1);
  fs::remove_all(dir3);
}
