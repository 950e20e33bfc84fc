#include "isac/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace isac {

namespace {
constexpr double two_pi = 6.283185307179586476925286766559;

// Axis response of length n for phase increment phi: entry p is
// exp(-j*phi*p)/sqrt(n).
void axis_response(double phi, int n, std::vector<cplx>& out) {
  out.resize(n);
  const double scale = 1.0 / std::sqrt(double(n));
  for (int p = 0; p < n; ++p) {
    out[p] = std::polar(scale, -phi * double(p));
  }
}
}  // namespace

void validate(const ArrayGeometry& geom) {
  if (geom.n_x < 1 || geom.n_y < 1) {
    throw std::invalid_argument("array geometry: element counts must be >= 1");
  }
  if (!(geom.spacing_m > 0.0)) {
    throw std::invalid_argument("array geometry: spacing must be positive");
  }
  if (!(geom.carrier_hz > 0.0)) {
    throw std::invalid_argument("array geometry: carrier must be positive");
  }
}

void validate(const SubcarrierPlan& plan) {
  if (plan.count < 1) {
    throw std::invalid_argument("subcarrier plan: count must be >= 1");
  }
  if (!(plan.bandwidth_hz > 0.0)) {
    throw std::invalid_argument("subcarrier plan: bandwidth must be positive");
  }
}

void validate(const SpaceAngle& angle) {
  if (std::abs(angle.x) > 1.0 || std::abs(angle.y) > 1.0) {
    throw std::invalid_argument(
        "space angle: direction cosines must lie in [-1, 1]");
  }
}

std::vector<double> subcarrier_frequencies(const SubcarrierPlan& plan) {
  validate(plan);
  const double delta = plan.spacing_hz();
  std::vector<double> freqs(plan.count);
  const double center = 0.5 * double(plan.count + 1);
  for (int m = 1; m <= plan.count; ++m) {
    freqs[m - 1] = (double(m) - center) * delta;
  }
  return freqs;
}

double element_delay(int index_x, int index_y, const SpaceAngle& angle,
                     const ArrayGeometry& geom) {
  validate(geom);
  validate(angle);
  if (index_x < 1 || index_x > geom.n_x || index_y < 1 || index_y > geom.n_y) {
    throw std::out_of_range("element_delay: element index (" +
                            std::to_string(index_x) + ", " +
                            std::to_string(index_y) + ") outside " +
                            std::to_string(geom.n_x) + " x " +
                            std::to_string(geom.n_y) + " array");
  }
  return geom.spacing_m *
         (double(index_x - 1) * angle.x + double(index_y - 1) * angle.y) /
         speed_of_light;
}

CVec array_response(double freq_offset_hz, const SpaceAngle& angle,
                    const ArrayGeometry& geom) {
  validate(geom);
  validate(angle);
  const double freq = geom.carrier_hz + freq_offset_hz;
  const double base = two_pi * freq * geom.spacing_m / speed_of_light;

  static thread_local std::vector<cplx> vx, vy;
  axis_response(base * angle.x, geom.n_x, vx);
  axis_response(base * angle.y, geom.n_y, vy);

  CVec v(geom.size());
  for (int i = 0; i < geom.n_x; ++i) {
    for (int j = 0; j < geom.n_y; ++j) {
      v[i * geom.n_y + j] = vx[i] * vy[j];
    }
  }
  return v;
}

std::vector<CMat> response_set(const ArrayGeometry& geom,
                               const SubcarrierPlan& plan,
                               const std::vector<SpaceAngle>& angles,
                               bool squint_aware) {
  const std::vector<double> freqs = subcarrier_frequencies(plan);
  std::vector<CMat> set(plan.count);
  for (int m = 0; m < plan.count; ++m) {
    set[m].resize(geom.size(), Eigen::Index(angles.size()));
    const double offset = squint_aware ? freqs[m] : 0.0;
    for (std::size_t k = 0; k < angles.size(); ++k) {
      set[m].col(Eigen::Index(k)) = array_response(offset, angles[k], geom);
    }
  }
  return set;
}

cplx sample_channel_gain(double gain_pow, double rician_k, Rng& rng) {
  if (gain_pow < 0.0) {
    throw std::invalid_argument("channel gain power must be nonnegative");
  }
  if (rician_k < 0.0) {
    throw std::invalid_argument("Rician factor must be nonnegative");
  }
  if (gain_pow == 0.0) return {0.0, 0.0};
  const double phase = rng.uniform(0.0, two_pi);
  if (rician_k >= 1e12) {
    return std::polar(std::sqrt(gain_pow), phase);
  }
  const cplx los = std::polar(
      std::sqrt(gain_pow * rician_k / (rician_k + 1.0)), phase);
  const cplx diffuse =
      std::sqrt(gain_pow / (rician_k + 1.0)) * rng.cnormal();
  return los + diffuse;
}

ChannelRealization sample_channel(const ChannelStats& stats, int n_subcarriers,
                                  Rng& rng) {
  ChannelRealization real;
  real.gains.resize(Eigen::Index(stats.size()), n_subcarriers);
  for (std::size_t k = 0; k < stats.size(); ++k) {
    for (int m = 0; m < n_subcarriers; ++m) {
      real.gains(Eigen::Index(k), m) =
          sample_channel_gain(stats[k].gain_pow, stats[k].rician_k, rng);
    }
  }
  return real;
}

CVec effective_channel(const CVec& response, cplx gain) {
  return gain * response;
}

double link_budget_power(const ArrayGeometry& geom, double gain_sat_db,
                         double gain_ut_db, double distance_m) {
  validate(geom);
  if (!(distance_m > 0.0)) {
    throw std::invalid_argument("link budget: distance must be positive");
  }
  const double amp = speed_of_light /
                     (4.0 * M_PI * geom.carrier_hz * distance_m);
  return db_to_linear(gain_sat_db) * db_to_linear(gain_ut_db) *
         double(geom.size()) * amp * amp;
}

}  // namespace isac
