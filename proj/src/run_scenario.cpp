#include "isac/run_scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "isac/channel.hpp"
#include "isac/comms_metrics.hpp"
#include "isac/digital_precoder.hpp"
#include "isac/hybrid_precoder.hpp"
#include "isac/rng.hpp"
#include "isac/sensing.hpp"

namespace isac {

namespace {

constexpr double kLn2 = 0.69314718055994530941723212145818;

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Output tables

struct Cell {
  enum class Kind { number, integer, text };
  Kind kind = Kind::number;
  double num = 0.0;
  long long whole = 0;
  std::string str;

  static Cell of(double v) {
    Cell c;
    c.kind = Kind::number;
    c.num = v;
    return c;
  }
  static Cell of_int(long long v) {
    Cell c;
    c.kind = Kind::integer;
    c.whole = v;
    return c;
  }
  static Cell of_text(std::string v) {
    Cell c;
    c.kind = Kind::text;
    c.str = std::move(v);
    return c;
  }
};

struct Table {
  std::string base;  // file name without extension
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Flow {
  std::vector<Table> tables;
  bool all_converged = true;
  std::vector<std::string> warnings;
};

std::string cell_csv(const Cell& c) {
  switch (c.kind) {
    case Cell::Kind::number:
      return format_double(c.num);
    case Cell::Kind::integer:
      return std::to_string(c.whole);
    case Cell::Kind::text:
      return c.str;
  }
  return "";
}

ordered_json cell_json(const Cell& c) {
  switch (c.kind) {
    case Cell::Kind::number:
      return ordered_json(c.num);
    case Cell::Kind::integer:
      return ordered_json(c.whole);
    case Cell::Kind::text:
      return ordered_json(c.str);
  }
  return ordered_json();
}

// ---------------------------------------------------------------------------
// Problem assembly

struct Problem {
  ArrayGeometry geom;
  SubcarrierPlan plan;
  double noise = 0.0;
  ChannelStats stats;
  TargetSet targets;
  std::vector<CMat> responses_true;    // frequency-dependent physics
  std::vector<CMat> responses_design;  // what the solver is given
};

double dbw_to_watt(double dbw) { return std::pow(10.0, dbw / 10.0); }

std::vector<double> power_points(const ScenarioConfig& cfg) {
  const int n = int(std::floor((cfg.power_dbw_max - cfg.power_dbw_min) /
                                   cfg.power_dbw_step +
                               1e-9)) +
                1;
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out[std::size_t(i)] = cfg.power_dbw_min + double(i) * cfg.power_dbw_step;
  }
  return out;
}

ArrayGeometry make_geometry(const ScenarioConfig& cfg, int side) {
  ArrayGeometry g;
  g.n_x = side > 0 ? side : cfg.n_x;
  g.n_y = side > 0 ? side : cfg.n_y;
  g.carrier_hz = cfg.carrier_hz;
  g.spacing_m = cfg.spacing_m > 0.0
                    ? cfg.spacing_m
                    : 0.5 * speed_of_light / cfg.carrier_hz;
  return g;
}

TargetSet make_targets(const ScenarioConfig& cfg) {
  TargetSet t;
  t.angles = cfg.target_angles;
  t.reflectivity.reserve(cfg.target_reflectivity.size());
  for (double r : cfg.target_reflectivity) t.reflectivity.emplace_back(r, 0.0);
  return t;
}

std::vector<SpaceAngle> draw_ut_angles(const ScenarioConfig& cfg, Rng& rng) {
  if (!cfg.ut_angles_auto) return cfg.ut_angles;
  std::vector<SpaceAngle> out(std::size_t(cfg.num_uts));
  for (auto& a : out) {
    a.x = rng.uniform(-1.0, 1.0);
    a.y = rng.uniform(-1.0, 1.0);
  }
  return out;
}

Problem assemble(const ScenarioConfig& cfg,
                 const std::vector<SpaceAngle>& ut_angles, int side,
                 double bandwidth_override) {
  Problem pr;
  pr.geom = make_geometry(cfg, side);
  pr.plan.bandwidth_hz =
      bandwidth_override > 0.0 ? bandwidth_override : cfg.bandwidth_hz;
  pr.plan.count = cfg.subcarriers;
  pr.noise = cfg.boltzmann_jk * pr.plan.spacing_hz() * cfg.temperature_k;
  const double gamma = link_budget_power(pr.geom, cfg.gain_sat_db,
                                         cfg.gain_ut_db, cfg.distance_m);
  const double kappa = db_to_linear(cfg.rician_k_db);
  pr.stats.reserve(ut_angles.size());
  for (const SpaceAngle& a : ut_angles) {
    pr.stats.push_back(UtStats{a, gamma, kappa});
  }
  pr.targets = make_targets(cfg);
  pr.responses_true = response_set(pr.geom, pr.plan, ut_angles, true);
  pr.responses_design =
      cfg.squint_aware ? pr.responses_true
                       : response_set(pr.geom, pr.plan, ut_angles, false);
  return pr;
}

PowerModel make_model(const ScenarioConfig& cfg, int n_t) {
  PowerModel m;
  m.inv_amp_eff = cfg.amp_inefficiency;
  m.n_rf_chains = cfg.structure == "fully-digital" ? n_t : cfg.rf_chains;
  m.p_rfc_w = cfg.p_rfc_w;
  m.p_lo_w = cfg.p_lo_w;
  m.p_bb_w = cfg.p_bb_w;
  m.p_al_w = cfg.p_al_w;
  return m;
}

SolverOptions make_solver_options(const ScenarioConfig& cfg, double budget) {
  SolverOptions o;
  o.power_budget_w = budget;
  o.outer_tol = cfg.solver_outer_tol;
  o.max_outer = cfg.solver_max_outer;
  o.inner_rel_tol = cfg.solver_inner_rel_tol;
  o.max_inner = cfg.solver_max_inner;
  return o;
}

HybridOptions make_hybrid_options(const ScenarioConfig& cfg,
                                  std::uint64_t seed) {
  HybridOptions o;
  o.rel_tol = cfg.hybrid_rel_tol;
  o.max_cycles = cfg.hybrid_max_cycles;
  o.seed = seed;
  return o;
}

HybridStructure to_structure(const ScenarioConfig& cfg) {
  return cfg.structure == "partially-connected"
             ? HybridStructure::partially_connected
             : HybridStructure::fully_connected;
}

// Sensing reference design carrying the same per-subcarrier power P / M as
// the communication design's total budget spread over subcarriers.
// Sensing design scaled so each subcarrier matches the Frobenius norm of
// the communication design it is mixed with. The factorization output is
// normalized to the communication norm, so equal scales make the mixing
// weight a pure directional trade; scaling by the raw budget instead would
// let an efficiency-saturated communication stage shrink the sensing share
// as the budget grows.
std::vector<CMat> matched_sensing_design(const Problem& pr, bool squint_aware,
                                         const PrecoderSet& b_com) {
  std::vector<CMat> b =
      sensing_precoder(pr.targets, pr.geom, pr.plan, squint_aware);
  for (std::size_t m = 0; m < b.size(); ++m) b[m] *= b_com[m].norm();
  return b;
}

// ---------------------------------------------------------------------------
// Shared sweep-point evaluation (digital solve + bound/MC energy efficiency)

struct EeEval {
  double ee_bound = 0.0;
  double ee_mc = 0.0;
  double ee_mc_stderr = 0.0;
  double sum_rate_bits = 0.0;
  double tx_power = 0.0;
  int iters = 0;
  bool converged = false;
  PrecoderSet precoders;
};

EeEval evaluate_digital(const Problem& pr, const ScenarioConfig& cfg,
                        double budget,
                        const std::vector<CMat>& responses_design,
                        const PrecoderSet* warm, Rng& mc_rng) {
  const PowerModel model = make_model(cfg, pr.geom.size());
  DigitalResult res =
      solve_fully_digital(responses_design, pr.stats, pr.noise, model,
                          make_solver_options(cfg, budget), warm);
  EeEval ev;
  ev.converged = res.converged;
  ev.iters = res.outer_iterations;
  const RateBound rb = rate_upper_bound(res.precoders, pr.responses_true,
                                        pr.stats, pr.noise, pr.plan);
  const double ptot = total_power(res.precoders, model);
  const McRate mc =
      ergodic_rate_mc(res.precoders, pr.responses_true, pr.stats, pr.noise,
                      pr.plan, cfg.mc_trials, mc_rng);
  ev.sum_rate_bits = rb.per_ut_nats_s.sum() / kLn2;
  if (ptot > 0.0) {
    ev.ee_bound = ev.sum_rate_bits / ptot;
    ev.ee_mc = (mc.sum_nats_s / kLn2) / ptot;
    ev.ee_mc_stderr = (mc.sum_stderr / kLn2) / ptot;
  }
  ev.tx_power = transmit_power(res.precoders);
  ev.precoders = std::move(res.precoders);
  return ev;
}

void note_if_capped(Flow& flow, bool converged, const std::string& where) {
  if (!converged) {
    flow.all_converged = false;
    flow.warnings.push_back(where + ": solver hit its iteration cap");
  }
}

// ---------------------------------------------------------------------------
// Scenario flows

Flow flow_ee_vs_power(const ScenarioConfig& cfg) {
  Flow flow;
  const std::vector<double> points = power_points(cfg);
  const std::size_t n = points.size();
  std::vector<double> bound(n, 0.0), mc(n, 0.0), var(n, 0.0), rate(n, 0.0),
      tx(n, 0.0);
  std::vector<int> iters(n, 0);

  for (int drop = 0; drop < cfg.num_drops; ++drop) {
    const std::uint64_t drop_seed =
        derive_seed(cfg.seed, std::uint64_t(drop));
    Rng angle_rng(derive_seed(drop_seed, 0));
    const Problem pr = assemble(cfg, draw_ut_angles(cfg, angle_rng), 0, 0.0);
    PrecoderSet warm;
    bool have_warm = false;
    for (std::size_t i = 0; i < n; ++i) {
      Rng mc_rng(derive_seed(drop_seed, 1000 + std::uint64_t(i)));
      EeEval ev = evaluate_digital(pr, cfg, dbw_to_watt(points[i]),
                                   pr.responses_design,
                                   have_warm ? &warm : nullptr, mc_rng);
      bound[i] += ev.ee_bound;
      mc[i] += ev.ee_mc;
      var[i] += ev.ee_mc_stderr * ev.ee_mc_stderr;
      rate[i] += ev.sum_rate_bits;
      tx[i] += ev.tx_power;
      iters[i] = std::max(iters[i], ev.iters);
      note_if_capped(flow, ev.converged,
                     "ee-vs-power drop " + std::to_string(drop) +
                         " power_dbw=" + format_double(points[i]));
      warm = std::move(ev.precoders);
      have_warm = true;
    }
  }

  Table t;
  t.base = "ee_vs_power";
  t.columns = {"power_dbw",    "ee_bound_bits_per_joule",
               "ee_mc_bits_per_joule", "ee_mc_stderr",
               "sum_rate_bits", "tx_power_w",
               "iters_outer"};
  const double d = double(cfg.num_drops);
  for (std::size_t i = 0; i < n; ++i) {
    t.rows.push_back({Cell::of(points[i]), Cell::of(bound[i] / d),
                      Cell::of(mc[i] / d), Cell::of(std::sqrt(var[i]) / d),
                      Cell::of(rate[i] / d), Cell::of(tx[i] / d),
                      Cell::of_int(iters[i])});
  }
  flow.tables.push_back(std::move(t));
  return flow;
}

Flow flow_ee_vs_antennas(const ScenarioConfig& cfg) {
  Flow flow;
  const std::vector<int>& sides = cfg.antenna_side_list;
  const std::size_t n = sides.size();
  std::vector<double> bound(n, 0.0), mc(n, 0.0), var(n, 0.0), rate(n, 0.0),
      tx(n, 0.0);
  std::vector<int> iters(n, 0);
  const double budget = dbw_to_watt(cfg.power_dbw);

  for (int drop = 0; drop < cfg.num_drops; ++drop) {
    const std::uint64_t drop_seed =
        derive_seed(cfg.seed, std::uint64_t(drop));
    Rng angle_rng(derive_seed(drop_seed, 0));
    const std::vector<SpaceAngle> angles = draw_ut_angles(cfg, angle_rng);
    for (std::size_t i = 0; i < n; ++i) {
      const Problem pr = assemble(cfg, angles, sides[i], 0.0);
      Rng mc_rng(derive_seed(drop_seed, 1000 + std::uint64_t(i)));
      EeEval ev = evaluate_digital(pr, cfg, budget, pr.responses_design,
                                   nullptr, mc_rng);
      bound[i] += ev.ee_bound;
      mc[i] += ev.ee_mc;
      var[i] += ev.ee_mc_stderr * ev.ee_mc_stderr;
      rate[i] += ev.sum_rate_bits;
      tx[i] += ev.tx_power;
      iters[i] = std::max(iters[i], ev.iters);
      note_if_capped(flow, ev.converged,
                     "ee-vs-antennas drop " + std::to_string(drop) +
                         " side=" + std::to_string(sides[i]));
    }
  }

  Table t;
  t.base = "ee_vs_antennas";
  t.columns = {"n_t",           "ee_bound_bits_per_joule",
               "ee_mc_bits_per_joule", "ee_mc_stderr",
               "sum_rate_bits", "tx_power_w",
               "iters_outer"};
  const double d = double(cfg.num_drops);
  for (std::size_t i = 0; i < n; ++i) {
    t.rows.push_back({Cell::of_int((long long)sides[i] * sides[i]),
                      Cell::of(bound[i] / d), Cell::of(mc[i] / d),
                      Cell::of(std::sqrt(var[i]) / d), Cell::of(rate[i] / d),
                      Cell::of(tx[i] / d), Cell::of_int(iters[i])});
  }
  flow.tables.push_back(std::move(t));
  return flow;
}

Flow flow_ee_vs_bandwidth(const ScenarioConfig& cfg) {
  Flow flow;
  const std::vector<double>& bands = cfg.bandwidth_list_hz;
  const std::size_t n = bands.size();
  std::vector<double> aware(n, 0.0), unaware(n, 0.0), aware_mc(n, 0.0),
      unaware_mc(n, 0.0);
  const double budget = dbw_to_watt(cfg.power_dbw);

  for (int drop = 0; drop < cfg.num_drops; ++drop) {
    const std::uint64_t drop_seed =
        derive_seed(cfg.seed, std::uint64_t(drop));
    Rng angle_rng(derive_seed(drop_seed, 0));
    const std::vector<SpaceAngle> angles = draw_ut_angles(cfg, angle_rng);
    for (std::size_t i = 0; i < n; ++i) {
      const Problem pr = assemble(cfg, angles, 0, bands[i]);
      const std::vector<CMat> responses_unaware =
          response_set(pr.geom, pr.plan, angles, false);
      Rng rng_aware(derive_seed(drop_seed, 1000 + std::uint64_t(i)));
      Rng rng_unaware(derive_seed(drop_seed, 3000 + std::uint64_t(i)));
      EeEval ev_aware = evaluate_digital(pr, cfg, budget, pr.responses_true,
                                         nullptr, rng_aware);
      EeEval ev_unaware = evaluate_digital(pr, cfg, budget, responses_unaware,
                                           nullptr, rng_unaware);
      aware[i] += ev_aware.ee_bound;
      unaware[i] += ev_unaware.ee_bound;
      aware_mc[i] += ev_aware.ee_mc;
      unaware_mc[i] += ev_unaware.ee_mc;
      note_if_capped(flow, ev_aware.converged,
                     "ee-vs-bandwidth drop " + std::to_string(drop) +
                         " bandwidth_hz=" + format_double(bands[i]) +
                         " aware");
      note_if_capped(flow, ev_unaware.converged,
                     "ee-vs-bandwidth drop " + std::to_string(drop) +
                         " bandwidth_hz=" + format_double(bands[i]) +
                         " unaware");
    }
  }

  Table t;
  t.base = "ee_vs_bandwidth";
  t.columns = {"bandwidth_hz",
               "ee_aware_bits_per_joule",
               "ee_unaware_bits_per_joule",
               "ee_gap_bits_per_joule",
               "ee_aware_mc_bits_per_joule",
               "ee_unaware_mc_bits_per_joule"};
  const double d = double(cfg.num_drops);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = aware[i] / d;
    const double u = unaware[i] / d;
    t.rows.push_back({Cell::of(bands[i]), Cell::of(a), Cell::of(u),
                      Cell::of(a - u), Cell::of(aware_mc[i] / d),
                      Cell::of(unaware_mc[i] / d)});
  }
  flow.tables.push_back(std::move(t));
  return flow;
}

Flow flow_beampattern(const ScenarioConfig& cfg) {
  Flow flow;
  const std::uint64_t drop_seed = derive_seed(cfg.seed, 0);
  Rng angle_rng(derive_seed(drop_seed, 0));
  const Problem pr = assemble(cfg, draw_ut_angles(cfg, angle_rng), 0, 0.0);
  const double budget = dbw_to_watt(cfg.power_dbw);
  const PowerModel model = make_model(cfg, pr.geom.size());

  DigitalResult digital =
      solve_fully_digital(pr.responses_design, pr.stats, pr.noise, model,
                          make_solver_options(cfg, budget), nullptr);
  note_if_capped(flow, digital.converged, "beampattern digital stage");

  std::vector<CMat> covs(std::size_t(pr.plan.count));
  if (cfg.structure == "fully-digital") {
    for (int m = 0; m < pr.plan.count; ++m) {
      covs[std::size_t(m)] =
          covariance_from_precoder(digital.precoders[std::size_t(m)]);
    }
  } else {
    const std::vector<CMat> b_ss =
        matched_sensing_design(pr, cfg.squint_aware, digital.precoders);
    HybridResult hybrid = solve_hybrid(
        digital.precoders, b_ss, cfg.rf_chains, to_structure(cfg), cfg.zeta,
        make_hybrid_options(cfg, derive_seed(drop_seed, 2)));
    note_if_capped(flow, hybrid.converged, "beampattern hybrid stage");
    for (int m = 0; m < pr.plan.count; ++m) {
      covs[std::size_t(m)] =
          covariance_from_hybrid(hybrid.precoder.analog[std::size_t(m)],
                                 hybrid.precoder.digital[std::size_t(m)]);
    }
  }

  const std::vector<double> freqs = subcarrier_frequencies(pr.plan);
  const std::vector<SpaceAngle> grid =
      angle_grid(cfg.grid_points, cfg.grid_points);
  std::vector<Eigen::VectorXd> vals(std::size_t(pr.plan.count));
  double peak = 0.0;
  for (int m = 0; m < pr.plan.count; ++m) {
    vals[std::size_t(m)] = beampattern(covs[std::size_t(m)], grid,
                                       freqs[std::size_t(m)], pr.geom);
    peak = std::max(peak, vals[std::size_t(m)].maxCoeff());
  }

  Table t;
  t.base = cfg.scenario == "beampattern-pc" ? "beampattern_pc"
                                            : "beampattern_fc";
  t.columns = {"theta_x", "theta_y", "subcarrier_index", "gain_db"};
  const double floor = peak * 1e-30;
  for (int m = 0; m < pr.plan.count; ++m) {
    const Eigen::VectorXd& v = vals[std::size_t(m)];
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double db =
          peak > 0.0
              ? 10.0 * std::log10(std::max(v[Eigen::Index(i)], floor) / peak)
              : 0.0;
      t.rows.push_back({Cell::of(grid[i].x), Cell::of(grid[i].y),
                        Cell::of_int(m), Cell::of(db)});
    }
  }
  flow.tables.push_back(std::move(t));
  return flow;
}

Flow flow_squint_cut(const ScenarioConfig& cfg) {
  Flow flow;
  const std::uint64_t drop_seed = derive_seed(cfg.seed, 0);
  Rng angle_rng(derive_seed(drop_seed, 0));
  const Problem pr = assemble(cfg, draw_ut_angles(cfg, angle_rng), 0, 0.0);

  const SpaceAngle target = cfg.target_angles.front();
  const char axis = cfg.cut_axis[0];
  const double fixed = axis == 'x' ? target.y : target.x;
  const std::vector<SpaceAngle> cut = angle_cut(cfg.cut_points, fixed, axis);
  const std::vector<double> freqs = subcarrier_frequencies(pr.plan);

  Table t;
  t.base = "squint_cut";
  t.columns = {"scheme",  "subcarrier_index", "freq_offset_hz",
               "theta_x", "theta_y",          "gain_db"};
  for (const bool aware : {true, false}) {
    const std::vector<CMat> b_ss =
        sensing_precoder(pr.targets, pr.geom, pr.plan, aware);
    std::vector<Eigen::VectorXd> vals(std::size_t(pr.plan.count));
    double peak = 0.0;
    for (int m = 0; m < pr.plan.count; ++m) {
      const CMat cov = covariance_from_precoder(b_ss[std::size_t(m)]);
      vals[std::size_t(m)] =
          beampattern(cov, cut, freqs[std::size_t(m)], pr.geom);
      peak = std::max(peak, vals[std::size_t(m)].maxCoeff());
    }
    const double floor = peak * 1e-30;
    const std::string scheme = aware ? "aware" : "unaware";
    for (int m = 0; m < pr.plan.count; ++m) {
      const Eigen::VectorXd& v = vals[std::size_t(m)];
      for (std::size_t i = 0; i < cut.size(); ++i) {
        const double db =
            peak > 0.0
                ? 10.0 *
                      std::log10(std::max(v[Eigen::Index(i)], floor) / peak)
                : 0.0;
        t.rows.push_back({Cell::of_text(scheme), Cell::of_int(m),
                          Cell::of(freqs[std::size_t(m)]),
                          Cell::of(cut[i].x), Cell::of(cut[i].y),
                          Cell::of(db)});
      }
    }
  }
  flow.tables.push_back(std::move(t));
  return flow;
}

Flow flow_pd_vs_power(const ScenarioConfig& cfg) {
  Flow flow;
  const std::vector<double> points = power_points(cfg);
  const std::uint64_t drop_seed = derive_seed(cfg.seed, 0);
  Rng angle_rng(derive_seed(drop_seed, 0));
  const Problem pr = assemble(cfg, draw_ut_angles(cfg, angle_rng), 0, 0.0);
  const PowerModel model = make_model(cfg, pr.geom.size());

  Table t;
  t.base = "pd_vs_power";
  t.columns = {"power_dbw", "zeta",       "noncentrality",
               "p_d",       "ee_bound_bits_per_joule", "tx_power_w",
               "iters_outer"};

  PrecoderSet warm;
  bool have_warm = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double budget = dbw_to_watt(points[i]);
    DigitalResult digital = solve_fully_digital(
        pr.responses_design, pr.stats, pr.noise, model,
        make_solver_options(cfg, budget), have_warm ? &warm : nullptr);
    note_if_capped(flow, digital.converged,
                   "pd-vs-power power_dbw=" + format_double(points[i]) +
                       " digital stage");

    PrecoderSet effective;
    if (cfg.structure == "fully-digital") {
      effective = digital.precoders;
    } else {
      const std::vector<CMat> b_ss =
          matched_sensing_design(pr, cfg.squint_aware, digital.precoders);
      HybridResult hybrid = solve_hybrid(
          digital.precoders, b_ss, cfg.rf_chains, to_structure(cfg), cfg.zeta,
          make_hybrid_options(cfg,
                              derive_seed(drop_seed, 5000 + std::uint64_t(i))));
      note_if_capped(flow, hybrid.converged,
                     "pd-vs-power power_dbw=" + format_double(points[i]) +
                         " hybrid stage");
      effective.resize(std::size_t(pr.plan.count));
      for (int m = 0; m < pr.plan.count; ++m) {
        effective[std::size_t(m)] = hybrid.precoder.analog[std::size_t(m)] *
                                    hybrid.precoder.digital[std::size_t(m)];
      }
    }

    std::vector<CMat> covs(std::size_t(pr.plan.count));
    for (int m = 0; m < pr.plan.count; ++m) {
      covs[std::size_t(m)] = covariance_from_precoder(effective[std::size_t(m)]);
    }
    const double nc = noncentrality_from_covariance(pr.targets, covs, pr.plan,
                                                    pr.geom, pr.noise);
    const double pd =
        detection_probability(nc, int(pr.targets.size()), cfg.p_fa);

    const RateBound rb = rate_upper_bound(effective, pr.responses_true,
                                          pr.stats, pr.noise, pr.plan);
    const double ptot = total_power(effective, model);
    const double ee =
        ptot > 0.0 ? (rb.per_ut_nats_s.sum() / kLn2) / ptot : 0.0;

    t.rows.push_back({Cell::of(points[i]), Cell::of(cfg.zeta), Cell::of(nc),
                      Cell::of(pd), Cell::of(ee),
                      Cell::of(transmit_power(effective)),
                      Cell::of_int(digital.outer_iterations)});
    warm = std::move(digital.precoders);
    have_warm = true;
  }
  flow.tables.push_back(std::move(t));
  return flow;
}

Flow flow_convergence(const ScenarioConfig& cfg) {
  Flow flow;
  const std::uint64_t drop_seed = derive_seed(cfg.seed, 0);
  Rng angle_rng(derive_seed(drop_seed, 0));
  const Problem pr = assemble(cfg, draw_ut_angles(cfg, angle_rng), 0, 0.0);
  const double budget = dbw_to_watt(cfg.power_dbw);
  const PowerModel model = make_model(cfg, pr.geom.size());

  DigitalResult digital =
      solve_fully_digital(pr.responses_design, pr.stats, pr.noise, model,
                          make_solver_options(cfg, budget), nullptr);
  note_if_capped(flow, digital.converged, "convergence digital stage");

  Table outer;
  outer.base = "convergence_digital";
  outer.columns = {"outer_iter",    "eta",        "objective",
                   "sum_rate_nats", "tx_power_w", "inner_cycles"};
  for (std::size_t i = 0; i < digital.trace.size(); ++i) {
    const auto& p = digital.trace[i];
    outer.rows.push_back({Cell::of_int((long long)i + 1), Cell::of(p.eta),
                          Cell::of(p.objective), Cell::of(p.sum_rate_nats),
                          Cell::of(p.total_power_w),
                          Cell::of_int(p.inner_cycles)});
  }
  flow.tables.push_back(std::move(outer));

  Table inner;
  inner.base = "convergence_digital_inner";
  inner.columns = {"outer_iter", "cycle", "objective"};
  for (std::size_t o = 0; o < digital.inner_objectives.size(); ++o) {
    for (std::size_t c = 0; c < digital.inner_objectives[o].size(); ++c) {
      inner.rows.push_back({Cell::of_int((long long)o + 1),
                            Cell::of_int((long long)c + 1),
                            Cell::of(digital.inner_objectives[o][c])});
    }
  }
  flow.tables.push_back(std::move(inner));

  if (cfg.structure != "fully-digital") {
    const std::vector<CMat> b_ss =
        matched_sensing_design(pr, cfg.squint_aware, digital.precoders);
    HybridResult hybrid = solve_hybrid(
        digital.precoders, b_ss, cfg.rf_chains, to_structure(cfg), cfg.zeta,
        make_hybrid_options(cfg, derive_seed(drop_seed, 2)));
    note_if_capped(flow, hybrid.converged, "convergence hybrid stage");
    Table h;
    h.base = "convergence_hybrid";
    h.columns = {"subcarrier_index", "cycle", "objective"};
    for (std::size_t m = 0; m < hybrid.objective_trace.size(); ++m) {
      for (std::size_t c = 0; c < hybrid.objective_trace[m].size(); ++c) {
        h.rows.push_back({Cell::of_int((long long)m),
                          Cell::of_int((long long)c + 1),
                          Cell::of(hybrid.objective_trace[m][c])});
      }
    }
    flow.tables.push_back(std::move(h));
  }
  return flow;
}

Flow dispatch(const ScenarioConfig& cfg) {
  if (cfg.scenario == "ee-vs-power") return flow_ee_vs_power(cfg);
  if (cfg.scenario == "ee-vs-antennas") return flow_ee_vs_antennas(cfg);
  if (cfg.scenario == "ee-vs-bandwidth") return flow_ee_vs_bandwidth(cfg);
  if (cfg.scenario == "beampattern-fc" || cfg.scenario == "beampattern-pc") {
    return flow_beampattern(cfg);
  }
  if (cfg.scenario == "squint-cut") return flow_squint_cut(cfg);
  if (cfg.scenario == "pd-vs-power") return flow_pd_vs_power(cfg);
  if (cfg.scenario == "convergence") return flow_convergence(cfg);
  throw ConfigError("config: scenario: unknown scenario '" + cfg.scenario +
                    "'");
}

}  // namespace

RunReport run_scenario(const ScenarioConfig& cfg) {
  validate_config(cfg);
  Flow flow = dispatch(cfg);

  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  const std::string hash_hex = config_hash_hex(cfg);

  RunReport report;
  report.hash = config_hash(cfg);
  report.all_converged = flow.all_converged;
  report.warnings = flow.warnings;

  ordered_json outputs = ordered_json::array();
  for (const Table& t : flow.tables) {
    const std::string ext = cfg.format == "json" ? ".json" : ".csv";
    const fs::path path = fs::path(cfg.output_dir) / (t.base + ext);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot open output file " + path.string());
    }
    if (cfg.format == "json") {
      ordered_json j;
      j["scenario"] = cfg.scenario;
      j["config_hash"] = hash_hex;
      j["seed"] = cfg.seed;
      j["columns"] = t.columns;
      ordered_json rows = ordered_json::array();
      for (const auto& row : t.rows) {
        ordered_json r = ordered_json::array();
        for (const Cell& c : row) r.push_back(cell_json(c));
        rows.push_back(std::move(r));
      }
      j["rows"] = std::move(rows);
      out << j.dump(2) << "\n";
    } else {
      out << "# scenario = " << cfg.scenario << "\n";
      out << "# config_hash = " << hash_hex << "\n";
      out << "# seed = " << cfg.seed << "\n";
      for (std::size_t i = 0; i < t.columns.size(); ++i) {
        out << (i ? "," : "") << t.columns[i];
      }
      out << "\n";
      for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
          out << (i ? "," : "") << cell_csv(row[i]);
        }
        out << "\n";
      }
    }
    out.flush();
    if (!out) {
      throw std::runtime_error("failed writing output file " + path.string());
    }
    report.files.push_back(path.string());

    ordered_json entry;
    entry["file"] = t.base + ext;
    entry["rows"] = t.rows.size();
    entry["columns"] = t.columns;
    outputs.push_back(std::move(entry));
  }

  ordered_json manifest;
  manifest["schema_version"] = cfg.schema_version;
  manifest["scenario"] = cfg.scenario;
  manifest["config_hash"] = hash_hex;
  manifest["seed"] = cfg.seed;
  manifest["format"] = cfg.format;
  manifest["all_converged"] = flow.all_converged;
  manifest["warnings"] = flow.warnings;
  manifest["outputs"] = std::move(outputs);
  // Canonical identity form: like the hash, the embedded config does not
  // mention where this particular run happened to land, so relocated runs
  // produce byte-identical manifests.
  ScenarioConfig canon = cfg;
  canon.output_dir = "out";
  manifest["resolved_config"] = serialize_config(canon);

  const fs::path mpath = fs::path(cfg.output_dir) / "manifest.json";
  std::ofstream mout(mpath, std::ios::binary);
  if (!mout) {
    throw std::runtime_error("cannot open output file " + mpath.string());
  }
  mout << manifest.dump(2) << "\n";
  mout.flush();
  if (!mout) {
    throw std::runtime_error("failed writing output file " + mpath.string());
  }
  report.manifest_path = mpath.string();
  return report;
}

}  // namespace isac
