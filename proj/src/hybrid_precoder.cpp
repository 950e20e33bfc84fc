#include "isac/hybrid_precoder.hpp"

#include <cmath>
#include <stdexcept>

#include "isac/rng.hpp"

namespace isac {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

void check_pair(const CMat& b_com, const CMat& b_ss) {
  if (b_com.rows() != b_ss.rows()) {
    throw std::invalid_argument(
        "hybrid: communication and sensing designs need equal antenna counts");
  }
  if (b_ss.cols() > b_com.cols()) {
    throw std::invalid_argument(
        "hybrid: rotation requires no more targets than UTs");
  }
}

int group_size(Eigen::Index n_t, Eigen::Index m_t) {
  if (m_t < 1 || n_t % m_t != 0) {
    throw std::invalid_argument(
        "hybrid: antenna count must be divisible by RF chain count");
  }
  return int(n_t / m_t);
}

// Largest eigenvalue of a Hermitian PSD matrix by power iteration. The
// result is inflated by 1e-9 relative so it stays an upper bound under
// round-off (the analog majorizer needs lambda >= lambda_max).
double lambda_max_psd(const CMat& y, const HybridOptions& opts) {
  if (y.rows() == 0) return 0.0;
  CVec x = CVec::Ones(y.rows());
  x.normalize();
  double lam = 0.0;
  for (int i = 0; i < opts.power_iter_max; ++i) {
    CVec z = y * x;
    const double n = z.norm();
    if (n <= 1e-300) return 0.0;
    x = z / n;
    const double next = std::real(cplx(x.adjoint() * y * x));
    if (std::abs(next - lam) <= opts.power_iter_tol * std::max(next, 1.0)) {
      lam = next;
      break;
    }
    lam = next;
  }
  return lam * (1.0 + 1e-9);
}

void check_zeta(double zeta) {
  if (!(zeta >= 0.0) || !(zeta <= 1.0)) {
    throw std::invalid_argument("hybrid: weight must lie in [0, 1]");
  }
}

}  // namespace

double hybrid_objective(const CMat& analog, const CMat& digital,
                        const CMat& b_com, const CMat& b_ss,
                        const CMat& rotation, double zeta) {
  check_zeta(zeta);
  const CMat prod = analog * digital;
  return zeta * (prod - b_com).squaredNorm() +
         (1.0 - zeta) * (prod - b_ss * rotation).squaredNorm();
}

CMat update_unitary(const CMat& b_ss, const CMat& analog,
                    const CMat& digital) {
  const Eigen::Index p_r = b_ss.cols();
  const Eigen::Index k = digital.cols();
  if (p_r > k) {
    throw std::invalid_argument(
        "update_unitary: rotation requires no more targets than UTs");
  }
  const CMat a = b_ss.adjoint() * (analog * digital);  // p_r x K
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().leftCols(p_r).adjoint();
}

CMat update_digital_fc(const CMat& analog, const CMat& b_com, const CMat& b_ss,
                       const CMat& rotation, double zeta) {
  check_zeta(zeta);
  check_pair(b_com, b_ss);
  const CMat gram = analog.adjoint() * analog;
  const CMat rhs = zeta * (analog.adjoint() * b_com) +
                   (1.0 - zeta) * (analog.adjoint() * (b_ss * rotation));
  return gram.completeOrthogonalDecomposition().solve(rhs);
}

CMat update_analog_fc(const CMat& analog_prev, const CMat& digital,
                      const CMat& b_com, const CMat& b_ss,
                      const CMat& rotation, double zeta,
                      const HybridOptions& opts) {
  check_zeta(zeta);
  check_pair(b_com, b_ss);
  // The stacked target blocks weight-average to plain products because the
  // weights sum to one: Y = W_BB W_BB^H and
  // G T^H = zeta W_BB B_com^H + (1 - zeta) W_BB (B_ss U)^H.
  const CMat y = digital * digital.adjoint();
  const CMat gt = zeta * (digital * b_com.adjoint()) +
                  (1.0 - zeta) * (digital * (b_ss * rotation).adjoint());
  const double lam = lambda_max_psd(y, opts);
  const CMat z =
      gt - (y - lam * CMat::Identity(y.rows(), y.cols())) *
               analog_prev.adjoint();
  CMat out(analog_prev.rows(), analog_prev.cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      out(i, j) = std::polar(1.0, -std::arg(z(j, i)));
    }
  }
  return out;
}

CMat update_digital_pc(const CMat& analog, const CMat& b_com, const CMat& b_ss,
                       const CMat& rotation, double zeta) {
  check_zeta(zeta);
  check_pair(b_com, b_ss);
  const int n_g = group_size(analog.rows(), analog.cols());
  const CMat rhs = zeta * (analog.adjoint() * b_com) +
                   (1.0 - zeta) * (analog.adjoint() * (b_ss * rotation));
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) return CMat::Zero(rhs.rows(), rhs.cols());
  const double target = b_com.norm() / std::sqrt(double(n_g));
  return (target / rhs_norm) * rhs;
}

CMat update_analog_pc(const CMat& digital, const CMat& b_com, const CMat& b_ss,
                      const CMat& rotation, double zeta) {
  check_zeta(zeta);
  check_pair(b_com, b_ss);
  const Eigen::Index n_t = b_com.rows();
  const Eigen::Index m_t = digital.rows();
  const int n_g = group_size(n_t, m_t);
  const CMat sensed = b_ss * rotation;
  CMat out = CMat::Zero(n_t, m_t);
  for (Eigen::Index i = 0; i < n_t; ++i) {
    const Eigen::Index j = i / n_g;
    const cplx s =
        zeta * cplx(b_com.row(i) * digital.row(j).adjoint()) +
        (1.0 - zeta) * cplx(sensed.row(i) * digital.row(j).adjoint());
    out(i, j) = std::polar(1.0, std::arg(s));
  }
  return out;
}

HybridResult solve_hybrid(const std::vector<CMat>& b_com,
                          const std::vector<CMat>& b_ss, int m_t,
                          HybridStructure structure, double zeta,
                          const HybridOptions& opts) {
  check_zeta(zeta);
  if (b_com.empty() || b_com.size() != b_ss.size()) {
    throw std::invalid_argument(
        "solve_hybrid: need matching per-subcarrier design sets");
  }
  const Eigen::Index n_t = b_com[0].rows();
  const Eigen::Index k = b_com[0].cols();
  const Eigen::Index p_r = b_ss[0].cols();
  if (m_t < 1 || m_t > n_t) {
    throw std::invalid_argument(
        "solve_hybrid: RF chain count must lie in [1, n_t]");
  }
  if (k > m_t) {
    throw std::invalid_argument(
        "solve_hybrid: need at least one RF chain per UT");
  }
  const bool pc = structure == HybridStructure::partially_connected;
  const int n_g = pc ? group_size(n_t, m_t) : 0;
  for (std::size_t m = 0; m < b_com.size(); ++m) {
    if (b_com[m].rows() != n_t || b_com[m].cols() != k ||
        b_ss[m].rows() != n_t || b_ss[m].cols() != p_r) {
      throw std::invalid_argument("solve_hybrid: inconsistent design shapes");
    }
    check_pair(b_com[m], b_ss[m]);
  }

  HybridResult result;
  result.precoder.structure = structure;
  result.precoder.analog.resize(b_com.size());
  result.precoder.digital.resize(b_com.size());
  result.precoder.rotation.resize(b_com.size());
  result.objective_trace.resize(b_com.size());

  for (std::size_t m = 0; m < b_com.size(); ++m) {
    Rng rng(derive_seed(opts.seed, std::uint64_t(m)));

    CMat analog;
    if (pc) {
      analog = CMat::Zero(n_t, m_t);
      for (Eigen::Index i = 0; i < n_t; ++i) {
        analog(i, i / n_g) = std::polar(1.0, rng.uniform(0.0, two_pi));
      }
    } else {
      analog.resize(n_t, m_t);
      for (Eigen::Index j = 0; j < m_t; ++j) {
        for (Eigen::Index i = 0; i < n_t; ++i) {
          analog(i, j) = std::polar(1.0, rng.uniform(0.0, two_pi));
        }
      }
    }

    CMat rotation = CMat::Zero(p_r, k);
    rotation.topLeftCorner(p_r, p_r).setIdentity();

    // Least-squares fit of the digital stage to the communication design;
    // the partially connected variant starts on its norm sphere.
    CMat digital = update_digital_fc(analog, b_com[m], b_ss[m], rotation, 1.0);
    if (pc) {
      const double dn = digital.norm();
      const double target = b_com[m].norm() / std::sqrt(double(n_g));
      if (dn > 0.0) digital *= target / dn;
    }

    double f_prev =
        hybrid_objective(analog, digital, b_com[m], b_ss[m], rotation, zeta);
    bool settled = false;
    for (int c = 0; c < opts.max_cycles; ++c) {
      rotation = update_unitary(b_ss[m], analog, digital);
      digital =
          pc ? update_digital_pc(analog, b_com[m], b_ss[m], rotation, zeta)
             : update_digital_fc(analog, b_com[m], b_ss[m], rotation, zeta);
      analog = pc ? update_analog_pc(digital, b_com[m], b_ss[m], rotation,
                                     zeta)
                  : update_analog_fc(analog, digital, b_com[m], b_ss[m],
                                     rotation, zeta, opts);
      const double f =
          hybrid_objective(analog, digital, b_com[m], b_ss[m], rotation, zeta);
      result.objective_trace[m].push_back(f);
      if (std::abs(f - f_prev) <= opts.rel_tol * std::max(f_prev, 1e-300)) {
        f_prev = f;
        settled = true;
        break;
      }
      f_prev = f;
    }
    if (!settled) result.converged = false;

    if (!pc) {
      const double prod_norm = (analog * digital).norm();
      if (prod_norm > 0.0) digital *= b_com[m].norm() / prod_norm;
    }

    result.precoder.analog[m] = std::move(analog);
    result.precoder.digital[m] = std::move(digital);
    result.precoder.rotation[m] = std::move(rotation);
  }
  return result;
}

}  // namespace isac
