#include "isac/digital_precoder.hpp"

#include <cmath>
#include <stdexcept>

#include "isac/kernels.hpp"

namespace isac {

namespace {

void check_problem(const std::vector<CMat>& responses,
                   const ChannelStats& stats, double noise_pow) {
  if (responses.empty()) {
    throw std::invalid_argument("precoder solve: empty response set");
  }
  const Eigen::Index k = Eigen::Index(stats.size());
  if (k < 1) {
    throw std::invalid_argument("precoder solve: need at least one UT");
  }
  for (const CMat& v : responses) {
    if (v.cols() != k || v.rows() < k) {
      throw std::invalid_argument(
          "precoder solve: response set needs n_t >= K columns per UT");
    }
  }
  if (!(noise_pow > 0.0)) {
    throw std::invalid_argument("precoder solve: noise must be positive");
  }
  for (const UtStats& s : stats) {
    if (s.gain_pow < 0.0) {
      throw std::invalid_argument(
          "precoder solve: channel powers must be nonnegative");
    }
  }
}

// Thin QR of each response matrix; fixed for the whole solve.
struct SubcarrierBasis {
  CMat q;  // n_t x K, orthonormal columns
  CMat r;  // K x K upper triangular
};

std::vector<SubcarrierBasis> build_bases(const std::vector<CMat>& responses) {
  std::vector<SubcarrierBasis> bases(responses.size());
  for (std::size_t m = 0; m < responses.size(); ++m) {
    const CMat& v = responses[m];
    Eigen::HouseholderQR<CMat> qr(v);
    bases[m].q =
        qr.householderQ() * CMat::Identity(v.rows(), v.cols());
    bases[m].r = qr.matrixQR()
                     .topLeftCorner(v.cols(), v.cols())
                     .template triangularView<Eigen::Upper>();
  }
  return bases;
}

// Spectral pieces of the per-subcarrier interference-plus-shift matrix
// restricted to the response span. The matrix acts as a multiple of the
// identity on the orthogonal complement, where both the right-hand sides
// and the power weights vanish, so K-dimensional spectra are exact.
struct SubcarrierFactor {
  CMat qs;              // n_t x K
  CMat sr;              // K x K, column k carries the coordinates of v_k
  Eigen::VectorXd lam;  // ascending eigenvalues, >= 0
  Eigen::VectorXd phi;  // power-curve weights per eigendirection
};

SubcarrierFactor build_factor(const SubcarrierBasis& basis,
                              const Eigen::VectorXd& w,
                              const Eigen::VectorXd& u) {
  SubcarrierFactor f;
  const CMat core = basis.r * w.asDiagonal() * basis.r.adjoint();
  Eigen::SelfAdjointEigenSolver<CMat> es(core);
  f.lam = es.eigenvalues().cwiseMax(0.0);
  f.sr = es.eigenvectors().adjoint() * basis.r;
  f.qs = basis.q * es.eigenvectors();
  const int k = int(basis.r.rows());
  f.phi = Eigen::VectorXd::Zero(k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      f.phi[i] += u[j] * std::norm(f.sr(i, j));
    }
  }
  return f;
}

// Transmit power of the closed-form solution as a function of the total
// diagonal shift c = eta/amp_eff + t. Strictly decreasing in c. Directions
// whose shifted eigenvalue is negligible carry (up to round-off) zero
// weight and are skipped, which realizes the pseudo-inverse convention for
// a singular shift.
double power_curve(const std::vector<SubcarrierFactor>& factors, double c) {
  double scale = c;
  for (const SubcarrierFactor& f : factors) {
    if (f.lam.size() > 0) scale = std::max(scale, f.lam.maxCoeff() + c);
  }
  const double thresh = 1e-12 * std::max(scale, 1e-300);
  double acc = 0.0;
  for (const SubcarrierFactor& f : factors) {
    for (int i = 0; i < f.lam.size(); ++i) {
      const double d = f.lam[i] + c;
      if (d <= thresh) continue;
      acc += f.phi[i] / (d * d);
    }
  }
  return acc;
}

PrecoderSet precoders_at(const std::vector<SubcarrierFactor>& factors,
                         const CMat& scal, double c) {
  double scale = c;
  for (const SubcarrierFactor& f : factors) {
    if (f.lam.size() > 0) scale = std::max(scale, f.lam.maxCoeff() + c);
  }
  const double thresh = 1e-12 * std::max(scale, 1e-300);
  const int n_k = int(scal.rows());
  PrecoderSet out(factors.size());
  CMat coeff(n_k, n_k);
  for (std::size_t m = 0; m < factors.size(); ++m) {
    const SubcarrierFactor& f = factors[m];
    for (int k = 0; k < n_k; ++k) {
      for (int i = 0; i < n_k; ++i) {
        const double d = f.lam[i] + c;
        coeff(i, k) =
            (d > thresh) ? f.sr(i, k) * scal(k, Eigen::Index(m)) / d : cplx{};
      }
    }
    out[m] = f.qs * coeff;
  }
  return out;
}

double sum_rate_nats(const PrecoderSet& precoders,
                     const std::vector<CMat>& responses,
                     const ChannelStats& stats, double noise_pow) {
  double rate = 0.0;
  const int n_k = int(stats.size());
  for (std::size_t m = 0; m < precoders.size(); ++m) {
    const CMat t = responses[m].adjoint() * precoders[m];
    for (int k = 0; k < n_k; ++k) {
      double own = 0.0, interf = 0.0;
      for (int l = 0; l < n_k; ++l) {
        const double p = stats[std::size_t(k)].gain_pow * std::norm(t(k, l));
        if (l == k)
          own = p;
        else
          interf += p;
      }
      rate += std::log1p(own / (interf + noise_pow));
    }
  }
  return rate;
}

double subproblem_value(const PrecoderSet& precoders,
                        const std::vector<CMat>& responses,
                        const ChannelStats& stats, double noise_pow,
                        double eta, const PowerModel& model) {
  return sum_rate_nats(precoders, responses, stats, noise_pow) -
         eta * total_power(precoders, model);
}

PrecoderUpdate core_update(const std::vector<SubcarrierBasis>& bases,
                           const ChannelStats& stats,
                           const Eigen::MatrixXd& lambda, const CMat& rho,
                           double eta, const PowerModel& model,
                           const SolverOptions& opts) {
  const int n_k = int(stats.size());
  const int n_m = int(bases.size());
  const double budget = opts.power_budget_w;

  CMat scal(n_k, n_m);
  std::vector<SubcarrierFactor> factors;
  factors.reserve(std::size_t(n_m));
  double rho_mass = 0.0;
  for (int m = 0; m < n_m; ++m) {
    Eigen::VectorXd w(n_k), u(n_k);
    for (int k = 0; k < n_k; ++k) {
      const double g = stats[std::size_t(k)].gain_pow;
      const double r2 = std::norm(rho(k, m));
      w[k] = r2 * g;
      u[k] = (1.0 + lambda(k, m)) * g * r2;
      scal(k, m) = std::sqrt((1.0 + lambda(k, m)) * g) * rho(k, m);
      rho_mass += r2 * g;
    }
    factors.push_back(build_factor(bases[std::size_t(m)], w, u));
  }

  PrecoderUpdate out;
  if (rho_mass == 0.0) {
    out.precoders.assign(std::size_t(n_m),
                         CMat::Zero(bases[0].q.rows(), n_k));
    return out;
  }

  const double c0 = eta * model.inv_amp_eff;
  const double p0 = power_curve(factors, c0);
  if (p0 <= budget) {
    out.precoders = precoders_at(factors, scal, c0);
    out.transmit_power = transmit_power(out.precoders);
    return out;
  }

  double t_hi = 1.0;
  while (power_curve(factors, c0 + t_hi) >= budget) {
    t_hi *= 2.0;
    if (t_hi > 1e300) {
      throw std::runtime_error(
          "precoder update: failed to bracket the power multiplier");
    }
  }
  double t_lo = 0.0, t_mid = 0.5 * t_hi;
  for (int i = 0; i < opts.max_bisection_steps; ++i) {
    t_mid = 0.5 * (t_lo + t_hi);
    const double p = power_curve(factors, c0 + t_mid);
    if (std::abs(p - budget) <= 1e-12 * budget) break;
    if (p > budget)
      t_lo = t_mid;
    else
      t_hi = t_mid;
  }
  out.t = t_mid;
  out.bisected = true;
  out.precoders = precoders_at(factors, scal, c0 + t_mid);
  out.transmit_power = transmit_power(out.precoders);
  return out;
}

}  // namespace

Eigen::MatrixXd update_lambda(const PrecoderSet& precoders,
                              const std::vector<CMat>& responses,
                              const ChannelStats& stats, double noise_pow) {
  check_problem(responses, stats, noise_pow);
  const int n_k = int(stats.size());
  const int n_m = int(precoders.size());
  Eigen::MatrixXd lambda(n_k, n_m);
  for (int m = 0; m < n_m; ++m) {
    const CMat t = responses[std::size_t(m)].adjoint() *
                   precoders[std::size_t(m)];
    for (int k = 0; k < n_k; ++k) {
      double own = 0.0, interf = 0.0;
      for (int l = 0; l < n_k; ++l) {
        const double p = stats[std::size_t(k)].gain_pow * std::norm(t(k, l));
        if (l == k)
          own = p;
        else
          interf += p;
      }
      lambda(k, m) = own / (interf + noise_pow);
    }
  }
  return lambda;
}

CMat update_rho(const PrecoderSet& precoders,
                const std::vector<CMat>& responses, const ChannelStats& stats,
                double noise_pow, const Eigen::MatrixXd& lambda) {
  check_problem(responses, stats, noise_pow);
  const int n_k = int(stats.size());
  const int n_m = int(precoders.size());
  CMat rho(n_k, n_m);
  for (int m = 0; m < n_m; ++m) {
    const CMat t = responses[std::size_t(m)].adjoint() *
                   precoders[std::size_t(m)];
    for (int k = 0; k < n_k; ++k) {
      const double g = stats[std::size_t(k)].gain_pow;
      double denom = noise_pow;
      for (int l = 0; l < n_k; ++l) denom += g * std::norm(t(k, l));
      rho(k, m) = std::sqrt((1.0 + lambda(k, m)) * g) * t(k, k) / denom;
    }
  }
  return rho;
}

PrecoderUpdate update_precoders(const std::vector<CMat>& responses,
                                const ChannelStats& stats,
                                const Eigen::MatrixXd& lambda, const CMat& rho,
                                double eta, const PowerModel& model,
                                const SolverOptions& opts) {
  if (!(opts.power_budget_w > 0.0)) {
    throw std::invalid_argument("precoder update: power budget must be > 0");
  }
  if (eta < 0.0) {
    throw std::invalid_argument("precoder update: eta must be nonnegative");
  }
  return core_update(build_bases(responses), stats, lambda, rho, eta, model,
                     opts);
}

DigitalResult solve_fully_digital(const std::vector<CMat>& responses,
                                  const ChannelStats& stats, double noise_pow,
                                  const PowerModel& model,
                                  const SolverOptions& opts,
                                  const PrecoderSet* warm_start) {
  check_problem(responses, stats, noise_pow);
  if (!(opts.power_budget_w > 0.0)) {
    throw std::invalid_argument("precoder solve: power budget must be > 0");
  }
  const int n_k = int(stats.size());
  const int n_m = int(responses.size());
  const double budget = opts.power_budget_w;

  PrecoderSet b;
  double eta = 0.0;
  if (warm_start) {
    if (int(warm_start->size()) != n_m) {
      throw std::invalid_argument("precoder solve: warm start shape mismatch");
    }
    b = *warm_start;
    const double pw = transmit_power(b);
    if (pw > budget) {
      const double s = std::sqrt(budget / pw);
      for (CMat& bm : b) bm *= s;
    }
    const double ptot = total_power(b, model);
    eta = ptot > 0.0
              ? sum_rate_nats(b, responses, stats, noise_pow) / ptot
              : 0.0;
  } else {
    // Power-exhausting matched-filter start.
    const double amp = std::sqrt(budget / double(n_k * n_m));
    b.resize(std::size_t(n_m));
    for (int m = 0; m < n_m; ++m) {
      b[std::size_t(m)] = amp * responses[std::size_t(m)];
    }
  }

  const std::vector<SubcarrierBasis> bases = build_bases(responses);

  DigitalResult result;
  for (int outer = 0; outer < opts.max_outer; ++outer) {
    std::vector<double> inner_objs;
    double f_prev = subproblem_value(b, responses, stats, noise_pow, eta,
                                     model);
    int cycles = 0;
    for (int c = 0; c < opts.max_inner; ++c) {
      const Eigen::MatrixXd lambda =
          update_lambda(b, responses, stats, noise_pow);
      const CMat rho = update_rho(b, responses, stats, noise_pow, lambda);
      b = core_update(bases, stats, lambda, rho, eta, model, opts)
              .precoders;
      const double f =
          subproblem_value(b, responses, stats, noise_pow, eta, model);
      inner_objs.push_back(f);
      ++cycles;
      if (std::abs(f - f_prev) <= opts.inner_rel_tol * std::max(1.0, std::abs(f))) {
        break;
      }
      f_prev = f;
    }

    const double rate = sum_rate_nats(b, responses, stats, noise_pow);
    const double ptot = total_power(b, model);
    const double f_final = rate - eta * ptot;
    result.trace.push_back({eta, f_final, rate, ptot, cycles});
    result.inner_objectives.push_back(std::move(inner_objs));

    const double new_eta = ptot > 0.0 ? rate / ptot : 0.0;
    eta = new_eta;
    if (f_final <= opts.outer_tol) {
      result.converged = true;
      break;
    }
  }

  result.precoders = std::move(b);
  result.eta = eta;
  result.outer_iterations = int(result.trace.size());
  return result;
}

}  // namespace isac
