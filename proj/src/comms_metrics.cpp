#include "isac/comms_metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "isac/kernels.hpp"

namespace isac {

namespace {

void check_shapes(const PrecoderSet& precoders,
                  const std::vector<CMat>& responses,
                  const ChannelStats& stats) {
  if (precoders.empty() || precoders.size() != responses.size()) {
    throw std::invalid_argument(
        "precoder and response sets must cover the same subcarriers");
  }
  const Eigen::Index k = Eigen::Index(stats.size());
  for (std::size_t m = 0; m < precoders.size(); ++m) {
    if (precoders[m].cols() != k || responses[m].cols() != k ||
        precoders[m].rows() != responses[m].rows()) {
      throw std::invalid_argument(
          "precoder/response shape mismatch against UT count");
    }
  }
}

}  // namespace

double noise_power(const SubcarrierPlan& plan, double noise_temp_k) {
  validate(plan);
  if (!(noise_temp_k > 0.0)) {
    throw std::invalid_argument("noise temperature must be positive");
  }
  return boltzmann_const * plan.spacing_hz() * noise_temp_k;
}

double sinr(const CMat& precoders, const CVec& channel, int k,
            double noise_pow) {
  if (k < 0 || k >= precoders.cols()) {
    throw std::out_of_range("sinr: UT index outside precoder columns");
  }
  if (precoders.rows() != channel.size()) {
    throw std::invalid_argument("sinr: channel length mismatch");
  }
  if (!(noise_pow > 0.0)) {
    throw std::invalid_argument("sinr: noise power must be positive");
  }
  const std::size_t n = std::size_t(channel.size());
  double desired = 0.0, interference = 0.0;
  for (Eigen::Index l = 0; l < precoders.cols(); ++l) {
    const cplx c = kernels::cdot(precoders.col(l).data(), channel.data(), n);
    const double p = std::norm(c);
    if (l == k)
      desired = p;
    else
      interference += p;
  }
  return desired / (interference + noise_pow);
}

RateBound rate_upper_bound(const PrecoderSet& precoders,
                           const std::vector<CMat>& responses,
                           const ChannelStats& stats, double noise_pow,
                           const SubcarrierPlan& plan) {
  check_shapes(precoders, responses, stats);
  if (!(noise_pow > 0.0)) {
    throw std::invalid_argument("rate bound: noise power must be positive");
  }
  const int n_k = int(stats.size());
  const int n_m = int(precoders.size());
  RateBound out;
  out.per_km_nats = Eigen::MatrixXd::Zero(n_k, n_m);
  out.per_ut_nats_s = Eigen::VectorXd::Zero(n_k);
  for (int m = 0; m < n_m; ++m) {
    const CMat& b = precoders[m];
    const CMat& v = responses[m];
    const std::size_t n = std::size_t(b.rows());
    for (int k = 0; k < n_k; ++k) {
      double desired = 0.0, interference = 0.0;
      for (int l = 0; l < n_k; ++l) {
        const cplx c = kernels::cdot(v.col(k).data(), b.col(l).data(), n);
        const double p = stats[k].gain_pow * std::norm(c);
        if (l == k)
          desired = p;
        else
          interference += p;
      }
      const double r = std::log1p(desired / (interference + noise_pow));
      out.per_km_nats(k, m) = r;
      out.sum_nats += r;
    }
  }
  out.per_ut_nats_s = plan.spacing_hz() * out.per_km_nats.rowwise().sum();
  return out;
}

McRate ergodic_rate_mc(const PrecoderSet& precoders,
                       const std::vector<CMat>& responses,
                       const ChannelStats& stats, double noise_pow,
                       const SubcarrierPlan& plan, int trials, Rng& rng) {
  check_shapes(precoders, responses, stats);
  if (trials < 2) {
    throw std::invalid_argument("ergodic_rate_mc: need at least 2 trials");
  }
  const int n_k = int(stats.size());
  const int n_m = int(precoders.size());

  // |v_k^H b_k|^2 and its interference row sum are fixed per (k, m); only
  // the scalar gain varies across trials.
  Eigen::MatrixXd desired(n_k, n_m), interf(n_k, n_m);
  for (int m = 0; m < n_m; ++m) {
    const CMat& b = precoders[m];
    const CMat& v = responses[m];
    const std::size_t n = std::size_t(b.rows());
    for (int k = 0; k < n_k; ++k) {
      double own = 0.0, rest = 0.0;
      for (int l = 0; l < n_k; ++l) {
        const double p =
            std::norm(kernels::cdot(v.col(k).data(), b.col(l).data(), n));
        if (l == k)
          own = p;
        else
          rest += p;
      }
      desired(k, m) = own;
      interf(k, m) = rest;
    }
  }

  // Welford accumulation: stable when the per-trial rates are (nearly)
  // identical, where a sum-of-squares formula would return round-off noise.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n_k);
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(n_k);
  for (int t = 0; t < trials; ++t) {
    for (int k = 0; k < n_k; ++k) {
      double rate_k = 0.0;
      for (int m = 0; m < n_m; ++m) {
        const cplx g =
            sample_channel_gain(stats[k].gain_pow, stats[k].rician_k, rng);
        const double num = std::norm(g) * desired(k, m);
        const double den = std::norm(g) * interf(k, m) + noise_pow;
        rate_k += std::log1p(num / den);
      }
      rate_k *= plan.spacing_hz();
      const double delta = rate_k - mean(k);
      mean(k) += delta / double(t + 1);
      m2(k) += delta * (rate_k - mean(k));
    }
  }

  McRate out;
  out.trials = trials;
  out.per_ut_nats_s = mean;
  out.per_ut_stderr = Eigen::VectorXd::Zero(n_k);
  double var_total = 0.0;
  for (int k = 0; k < n_k; ++k) {
    const double var = std::max(0.0, m2(k) / double(trials - 1));
    out.per_ut_stderr(k) = std::sqrt(var / double(trials));
    var_total += var / double(trials);
  }
  out.sum_nats_s = out.per_ut_nats_s.sum();
  // Per-UT rates are independent across k (independent gain draws).
  out.sum_stderr = std::sqrt(var_total);
  return out;
}

double transmit_power(const PrecoderSet& precoders) {
  double p = 0.0;
  for (const CMat& b : precoders) {
    p += kernels::norm2_sq(b.data(), std::size_t(b.size()));
  }
  return p;
}

double total_power(const PrecoderSet& precoders, const PowerModel& model) {
  if (!(model.inv_amp_eff > 0.0)) {
    throw std::invalid_argument("power model: 1/efficiency must be positive");
  }
  return model.inv_amp_eff * transmit_power(precoders) +
         model.static_power_w();
}

double energy_efficiency(const PrecoderSet& precoders,
                         const std::vector<CMat>& responses,
                         const ChannelStats& stats, double noise_pow,
                         const SubcarrierPlan& plan, const PowerModel& model) {
  const RateBound bound =
      rate_upper_bound(precoders, responses, stats, noise_pow, plan);
  return bound.per_ut_nats_s.sum() / total_power(precoders, model);
}

}  // namespace isac
