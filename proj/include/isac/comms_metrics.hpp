// Downlink communication metrics: SINR, ergodic-rate estimates and their
// statistical upper bound, transmit/total power, and energy efficiency.
//
// Rates are computed internally in nats. Per-UT totals are weighted by the
// subcarrier spacing (nats/s); the unweighted per-(k, m) sums are what the
// precoder solvers optimize. Reporting layers convert to bits where needed.

#pragma once

#include <vector>

#include "isac/channel.hpp"
#include "isac/core.hpp"
#include "isac/rng.hpp"

namespace isac {

// One precoder matrix per subcarrier, n_t x K, column k serving UT k.
using PrecoderSet = std::vector<CMat>;

struct PowerModel {
  double inv_amp_eff = 2.0;  // 1 / amplifier efficiency
  int n_rf_chains = 1;
  double p_rfc_w = 0.338;
  double p_lo_w = 0.005;
  double p_bb_w = 0.2;
  double p_al_w = 0.0;

  double static_power_w() const {
    return double(n_rf_chains) * p_rfc_w + p_lo_w + p_bb_w + p_al_w;
  }
};

// Thermal noise power over one subcarrier: k_B * spacing * temperature.
double noise_power(const SubcarrierPlan& plan, double noise_temp_k);

// Instantaneous SINR of UT k (0-based) for one subcarrier given the realized
// channel of that UT.
double sinr(const CMat& precoders, const CVec& channel, int k,
            double noise_pow);

struct RateBound {
  Eigen::MatrixXd per_km_nats;    // K x M
  Eigen::VectorXd per_ut_nats_s;  // spacing-weighted subcarrier sums
  double sum_nats = 0.0;          // unweighted sum over all (k, m)
};

// Statistical-CSI upper bound on the ergodic rate. The per-(k, m) term is
// log(1 + g_k |v_k^H b_k|^2 / (sum_{l != k} g_k |v_k^H b_l|^2 + N0)) with
// g_k the average channel power; by Jensen this dominates the Monte-Carlo
// ergodic rate.
RateBound rate_upper_bound(const PrecoderSet& precoders,
                           const std::vector<CMat>& responses,
                           const ChannelStats& stats, double noise_pow,
                           const SubcarrierPlan& plan);

struct McRate {
  Eigen::VectorXd per_ut_nats_s;
  Eigen::VectorXd per_ut_stderr;
  double sum_nats_s = 0.0;
  double sum_stderr = 0.0;
  int trials = 0;
};

// Monte-Carlo ergodic rate over independent Rician gain draws per (k, m).
// Draw order is trial-major, then UT, then subcarrier, so results are
// reproducible for a given rng seed.
McRate ergodic_rate_mc(const PrecoderSet& precoders,
                       const std::vector<CMat>& responses,
                       const ChannelStats& stats, double noise_pow,
                       const SubcarrierPlan& plan, int trials, Rng& rng);

// Sum of squared column norms over all subcarriers.
double transmit_power(const PrecoderSet& precoders);

// inv_amp_eff * transmit_power + static circuit power.
double total_power(const PrecoderSet& precoders, const PowerModel& model);

// Upper-bound sum rate (spacing-weighted, nats/s) divided by total power.
double energy_efficiency(const PrecoderSet& precoders,
                         const std::vector<CMat>& responses,
                         const ChannelStats& stats, double noise_pow,
                         const SubcarrierPlan& plan, const PowerModel& model);

}  // namespace isac
