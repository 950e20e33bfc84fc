#include "isac/sensing.hpp"

#include <cmath>
#include <stdexcept>

#include "isac/chi_squared.hpp"
#include "isac/kernels.hpp"

namespace isac {

void validate(const TargetSet& targets) {
  if (targets.angles.empty()) {
    throw std::invalid_argument("target set: need at least one target");
  }
  if (targets.reflectivity.size() != targets.angles.size()) {
    throw std::invalid_argument(
        "target set: one reflectivity coefficient per target required");
  }
  for (const SpaceAngle& a : targets.angles) validate(a);
}

std::vector<CMat> sensing_precoder(const TargetSet& targets,
                                   const ArrayGeometry& geom,
                                   const SubcarrierPlan& plan,
                                   bool squint_aware) {
  validate(targets);
  validate(geom);
  const int n_t = geom.size();
  const int p_r = int(targets.size());
  if (n_t % p_r != 0) {
    throw std::invalid_argument(
        "sensing precoder: antenna count must be divisible by target count");
  }
  const int n_g = n_t / p_r;
  const std::vector<CMat> responses =
      response_set(geom, plan, targets.angles, squint_aware);
  std::vector<CMat> out(responses.size());
  for (std::size_t m = 0; m < responses.size(); ++m) {
    out[m] = CMat::Zero(n_t, p_r);
    for (int p = 0; p < p_r; ++p) {
      out[m].col(p).segment(p * n_g, n_g) =
          responses[m].col(p).segment(p * n_g, n_g);
    }
  }
  return out;
}

CMat covariance_from_precoder(const CMat& precoder) {
  return precoder * precoder.adjoint();
}

CMat covariance_from_hybrid(const CMat& analog, const CMat& digital) {
  if (analog.cols() != digital.rows()) {
    throw std::invalid_argument(
        "covariance_from_hybrid: analog columns must match digital rows");
  }
  return covariance_from_precoder(analog * digital);
}

Eigen::VectorXd beampattern(const CMat& cov,
                            const std::vector<SpaceAngle>& points,
                            double freq_offset_hz, const ArrayGeometry& geom) {
  validate(geom);
  if (cov.rows() != cov.cols() || cov.rows() != geom.size()) {
    throw std::invalid_argument(
        "beampattern: covariance must be square with one row per antenna");
  }
  Eigen::VectorXd gains(Eigen::Index(points.size()));
  const std::size_t n = std::size_t(geom.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const CVec v = array_response(freq_offset_hz, points[i], geom);
    gains[Eigen::Index(i)] = kernels::quadform_herm(cov.data(), n, v.data());
  }
  return gains;
}

std::vector<SpaceAngle> angle_grid(int n_x, int n_y) {
  if (n_x < 2 || n_y < 2) {
    throw std::invalid_argument("angle grid: need at least 2 points per axis");
  }
  std::vector<SpaceAngle> pts;
  pts.reserve(std::size_t(n_x) * std::size_t(n_y));
  for (int i = 0; i < n_x; ++i) {
    const double x = -1.0 + 2.0 * double(i) / double(n_x - 1);
    for (int j = 0; j < n_y; ++j) {
      const double y = -1.0 + 2.0 * double(j) / double(n_y - 1);
      pts.push_back({x, y});
    }
  }
  return pts;
}

std::vector<SpaceAngle> angle_cut(int n, double fixed, char axis) {
  if (n < 2) {
    throw std::invalid_argument("angle cut: need at least 2 points");
  }
  if (axis != 'x' && axis != 'y') {
    throw std::invalid_argument("angle cut: axis must be 'x' or 'y'");
  }
  std::vector<SpaceAngle> pts;
  pts.reserve(std::size_t(n));
  for (int i = 0; i < n; ++i) {
    const double c = -1.0 + 2.0 * double(i) / double(n - 1);
    if (axis == 'x')
      pts.push_back({c, fixed});
    else
      pts.push_back({fixed, c});
  }
  return pts;
}

namespace {

// ||A diag(beta) A^H||_F^2 via the P x P Gram matrix: with
// G = sum_p beta_p v_p v_p^H,
// tr(G G^H) = sum_{p,q} beta_p conj(beta_q) |v_q^H v_p|^2.
double squared_fro_of_reflected(const CMat& a,
                                const std::vector<cplx>& beta) {
  const int p_r = int(a.cols());
  CMat gram(p_r, p_r);  // gram(q, p) = v_q^H v_p
  for (int q = 0; q < p_r; ++q) {
    for (int p = 0; p < p_r; ++p) {
      gram(q, p) = kernels::cdot(a.col(q).data(), a.col(p).data(),
                                 std::size_t(a.rows()));
    }
  }
  cplx total = 0.0;
  for (int p = 0; p < p_r; ++p) {
    for (int q = 0; q < p_r; ++q) {
      total += beta[std::size_t(p)] * std::conj(beta[std::size_t(q)]) *
               std::norm(gram(q, p));
    }
  }
  return total.real();
}

}  // namespace

double noncentrality(const TargetSet& targets, double power_budget,
                     const SubcarrierPlan& plan, const ArrayGeometry& geom,
                     double noise_pow) {
  validate(targets);
  validate(geom);
  if (power_budget < 0.0) {
    throw std::invalid_argument("noncentrality: power must be nonnegative");
  }
  if (!(noise_pow > 0.0)) {
    throw std::invalid_argument("noncentrality: noise must be positive");
  }
  const std::vector<CMat> responses =
      response_set(geom, plan, targets.angles, true);
  const double m = double(plan.count);
  const double per_entry = power_budget / (m * double(geom.size()));
  double acc = 0.0;
  for (const CMat& a : responses) {
    acc += per_entry * squared_fro_of_reflected(a, targets.reflectivity);
  }
  return acc / (m * noise_pow);
}

double noncentrality_from_covariance(const TargetSet& targets,
                                     const std::vector<CMat>& covs,
                                     const SubcarrierPlan& plan,
                                     const ArrayGeometry& geom,
                                     double noise_pow) {
  validate(targets);
  validate(geom);
  if (int(covs.size()) != plan.count) {
    throw std::invalid_argument(
        "noncentrality_from_covariance: one covariance per subcarrier");
  }
  if (!(noise_pow > 0.0)) {
    throw std::invalid_argument("noncentrality: noise must be positive");
  }
  const std::vector<CMat> responses =
      response_set(geom, plan, targets.angles, true);
  const int p_r = int(targets.size());
  Eigen::VectorXcd beta(p_r);
  for (int p = 0; p < p_r; ++p) beta[p] = targets.reflectivity[std::size_t(p)];

  double acc = 0.0;
  for (int m = 0; m < plan.count; ++m) {
    const CMat& a = responses[std::size_t(m)];
    const CMat& x = covs[std::size_t(m)];
    if (x.rows() != geom.size() || x.cols() != geom.size()) {
      throw std::invalid_argument(
          "noncentrality_from_covariance: covariance shape mismatch");
    }
    // G = A diag(beta) A^H: the echo from target p is driven by the same
    // illumination inner product v_p^H x as the transmit beampattern, so a
    // covariance whose beams point at the targets maximizes the statistic.
    // tr(G X G^H) = tr(diag(beta) S diag(beta)^H C) with S = A^H X A and
    // C = A^H A.
    const CMat s = a.adjoint() * x * a;
    const CMat c = a.adjoint() * a;
    const CMat d = beta.asDiagonal();
    acc += (d * s * d.adjoint() * c).trace().real();
  }
  return acc / (double(plan.count) * noise_pow);
}

double detection_probability(double noncentrality_value, int n_targets,
                             double p_fa) {
  if (n_targets < 1) {
    throw std::invalid_argument(
        "detection_probability: need at least one target");
  }
  if (noncentrality_value < 0.0) {
    throw std::invalid_argument(
        "detection_probability: noncentrality must be nonnegative");
  }
  if (!(p_fa > 0.0) || p_fa > 1.0) {
    throw std::invalid_argument(
        "detection_probability: false-alarm rate must lie in (0, 1]");
  }
  const int dof = 2 * n_targets;
  const double threshold = chi_squared_quantile(dof, 1.0 - p_fa);
  return 1.0 - noncentral_chi_squared_cdf(dof, noncentrality_value, threshold);
}

}  // namespace isac
