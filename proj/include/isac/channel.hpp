// Wide-band UPA downlink channel model.
//
// The transmit array is an n_x-by-n_y uniform planar array. Directions are
// expressed as space angles (direction cosines along the two array axes),
// each in [-1, 1]. Array responses are frequency dependent: the phase of
// element (i, j) at baseband offset f is -2*pi*(f_c + f) * delay(i, j), so
// the response of a fixed direction drifts across subcarriers (beam squint).
// Per-UT small-scale fading is Rician on top of a deterministic link budget.

#pragma once

#include <vector>

#include "isac/core.hpp"
#include "isac/rng.hpp"

namespace isac {

struct ArrayGeometry {
  int n_x = 1;          // elements along the x axis
  int n_y = 1;          // elements along the y axis
  double spacing_m = 0.0075;
  double carrier_hz = 20.0e9;

  int size() const { return n_x * n_y; }
  double wavelength_m() const { return speed_of_light / carrier_hz; }
};

struct SubcarrierPlan {
  double bandwidth_hz = 800.0e6;
  int count = 1;

  double spacing_hz() const { return bandwidth_hz / count; }
  double symbol_duration_s() const { return 1.0 / bandwidth_hz; }
};

// Direction cosines along the array axes; magnitudes bounded by 1.
struct SpaceAngle {
  double x = 0.0;
  double y = 0.0;
};

// Statistical description of one UT link.
struct UtStats {
  SpaceAngle angle;
  double gain_pow = 1.0;  // average channel power (link budget)
  double rician_k = 1.0;  // Rician factor, linear
};

using ChannelStats = std::vector<UtStats>;

// One draw of the small-scale gains; (k, m) entry pairs with response k at
// subcarrier m.
struct ChannelRealization {
  CMat gains;  // K x M
};

void validate(const ArrayGeometry& geom);
void validate(const SubcarrierPlan& plan);
void validate(const SpaceAngle& angle);

// Baseband subcarrier center offsets, symmetric around DC, spacing B_w / M.
std::vector<double> subcarrier_frequencies(const SubcarrierPlan& plan);

// Propagation delay of element (index_x, index_y) relative to element (1, 1)
// toward the given direction. Indices are 1-based; out-of-range indices
// throw std::out_of_range.
double element_delay(int index_x, int index_y, const SpaceAngle& angle,
                     const ArrayGeometry& geom);

// Unit-norm UPA response at baseband offset freq_offset_hz. Entry
// (i-1)*n_y + (j-1) corresponds to element (i, j) and carries phase
// -2*pi*(f_c + f)*delay(i, j); the result factors as the Kronecker product
// of the two axis responses.
CVec array_response(double freq_offset_hz, const SpaceAngle& angle,
                    const ArrayGeometry& geom);

// Responses for all UTs and subcarriers; responses[m] is n_t x K with
// column k the response of UT k at subcarrier m. With squint_aware = false
// every subcarrier reuses the center-frequency response.
std::vector<CMat> response_set(const ArrayGeometry& geom,
                               const SubcarrierPlan& plan,
                               const std::vector<SpaceAngle>& angles,
                               bool squint_aware = true);

// One Rician gain draw: deterministic component of power
// gain_pow * k / (k + 1) with a uniform random phase plus a circularly
// symmetric diffuse component of power gain_pow / (k + 1). Rician factors
// at or above 1e12 collapse to the deterministic magnitude sqrt(gain_pow).
cplx sample_channel_gain(double gain_pow, double rician_k, Rng& rng);

// Gains for all UTs and subcarriers, drawn independently per (k, m).
ChannelRealization sample_channel(const ChannelStats& stats, int n_subcarriers,
                                  Rng& rng);

// h = gain * response.
CVec effective_channel(const CVec& response, cplx gain);

// Average received channel power for an isotropic-element array:
// g_sat * g_ut * n_t * (c / (4*pi*f_c*d))^2, gains given in dB.
double link_budget_power(const ArrayGeometry& geom, double gain_sat_db,
                         double gain_ut_db, double distance_m);

}  // namespace isac
