// Sensing side of the ISAC link: sub-arrayed sensing precoder, transmit
// beampattern, echo noncentrality, and detection probability.
//
// The array is split row-wise into one sub-array per target; the sensing
// precoder is block diagonal, block p carrying the matching segment of the
// target-p array response at each subcarrier. Detection is modeled as a
// noncentral chi-squared test with 2 * n_targets degrees of freedom.

#pragma once

#include <vector>

#include "isac/channel.hpp"
#include "isac/core.hpp"

namespace isac {

struct TargetSet {
  std::vector<SpaceAngle> angles;
  std::vector<cplx> reflectivity;  // one coefficient per target

  std::size_t size() const { return angles.size(); }
};

void validate(const TargetSet& targets);

// Block-diagonal sensing precoders, one n_t x n_targets matrix per
// subcarrier. Requires n_t divisible by the target count. Column p is
// supported on rows [p*n_g, (p+1)*n_g) with n_g = n_t / n_targets and
// equals that segment of the target-p response; each column has squared
// norm 1 / n_targets. With squint_aware = false all subcarriers reuse the
// center-frequency responses.
std::vector<CMat> sensing_precoder(const TargetSet& targets,
                                   const ArrayGeometry& geom,
                                   const SubcarrierPlan& plan,
                                   bool squint_aware = true);

// Transmit covariance of a hybrid precoder: (analog*digital)(analog*digital)^H.
CMat covariance_from_hybrid(const CMat& analog, const CMat& digital);

// b b^H summed over columns.
CMat covariance_from_precoder(const CMat& precoder);

// Beampattern gains v^H X v at one subcarrier offset over a list of
// directions. X must be n_t x n_t Hermitian.
Eigen::VectorXd beampattern(const CMat& cov,
                            const std::vector<SpaceAngle>& points,
                            double freq_offset_hz, const ArrayGeometry& geom);

// Row-major uniform grid over [-1, 1]^2 (x outer, y inner).
std::vector<SpaceAngle> angle_grid(int n_x, int n_y);

// 1-D cut: axis 'x' varies the x cosine with y fixed, axis 'y' the reverse.
std::vector<SpaceAngle> angle_cut(int n, double fixed, char axis);

// Echo-energy noncentrality for an isotropic probing signal of total power
// power_budget spread over all subcarriers and antennas:
//   sum_m (P / (M*n_t)) * ||A_m diag(beta) A_m^H||_F^2 / (M * noise_pow)
// with A_m the target response matrix at subcarrier m.
double noncentrality(const TargetSet& targets, double power_budget,
                     const SubcarrierPlan& plan, const ArrayGeometry& geom,
                     double noise_pow);

// Same statistic with the probing covariance replaced by the actual
// transmit covariance per subcarrier:
//   sum_m tr(G_m X_m G_m^H) / (M * noise_pow), G_m = A_m diag(beta) A_m^H.
double noncentrality_from_covariance(const TargetSet& targets,
                                     const std::vector<CMat>& covs,
                                     const SubcarrierPlan& plan,
                                     const ArrayGeometry& geom,
                                     double noise_pow);

// 1 - F(F^-1(1 - p_fa)) for the noncentral chi-squared test with
// 2 * n_targets degrees of freedom.
double detection_probability(double noncentrality_value, int n_targets,
                             double p_fa);

}  // namespace isac
