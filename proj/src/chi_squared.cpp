#include "isac/chi_squared.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace isac {

namespace {

constexpr int max_gamma_iters = 1000;
constexpr double gamma_eps = 1e-15;

// Series representation, converges fast for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < max_gamma_iters; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * gamma_eps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x), stable for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = std::numeric_limits<double>::min() / gamma_eps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= max_gamma_iters; ++i) {
    const double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < gamma_eps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) {
    throw std::invalid_argument("regularized_gamma_p: a must be positive");
  }
  if (x < 0.0) {
    throw std::invalid_argument("regularized_gamma_p: x must be nonnegative");
  }
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double chi_squared_cdf(int dof, double x) {
  if (dof < 1) {
    throw std::invalid_argument("chi_squared_cdf: dof must be >= 1");
  }
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(0.5 * double(dof), 0.5 * x);
}

double chi_squared_quantile(int dof, double p) {
  if (dof < 1) {
    throw std::invalid_argument("chi_squared_quantile: dof must be >= 1");
  }
  if (p < 0.0 || p >= 1.0) {
    throw std::invalid_argument("chi_squared_quantile: p must lie in [0, 1)");
  }
  if (p == 0.0) return 0.0;

  double lo = 0.0;
  double hi = double(dof) + 10.0;
  while (chi_squared_cdf(dof, hi) < p) {
    hi *= 2.0;
    if (hi > 1e300) {
      throw std::runtime_error("chi_squared_quantile: bracket overflow");
    }
  }
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < 400; ++i) {
    mid = 0.5 * (lo + hi);
    const double f = chi_squared_cdf(dof, mid);
    if (std::abs(f - p) <= 1e-12) break;
    if (f < p)
      lo = mid;
    else
      hi = mid;
  }
  return mid;
}

double noncentral_chi_squared_cdf(int dof, double lambda, double x) {
  if (dof < 1) {
    throw std::invalid_argument(
        "noncentral_chi_squared_cdf: dof must be >= 1");
  }
  if (lambda < 0.0) {
    throw std::invalid_argument(
        "noncentral_chi_squared_cdf: noncentrality must be nonnegative");
  }
  if (x <= 0.0) return 0.0;
  if (lambda == 0.0) return chi_squared_cdf(dof, x);

  const double half_l = 0.5 * lambda;
  const double half_x = 0.5 * x;
  const double a0 = 0.5 * double(dof);
  const long mode = long(half_l);

  // Weight, central CDF, and the gamma increment t(a) = x^a e^-x / G(a+1)
  // at the mode; both walks update them by recurrence.
  auto log_pois = [&](long i) {
    return -half_l + double(i) * std::log(half_l) - std::lgamma(double(i) + 1.0);
  };
  const double w_mode = std::exp(log_pois(mode));
  const double a_mode = a0 + double(mode);
  const double p_mode = regularized_gamma_p(a_mode, half_x);
  const double t_mode = std::exp(a_mode * std::log(half_x) - half_x -
                                 std::lgamma(a_mode + 1.0));

  double sum = w_mode * p_mode;
  double weight_used = w_mode;

  // Upward from the mode: P(a+1) = P(a) - t(a).
  {
    double w = w_mode, p = p_mode, t = t_mode;
    double a = a_mode;
    for (long i = mode + 1; i < mode + 100000; ++i) {
      w *= half_l / double(i);
      p -= t;
      if (p < 0.0) p = 0.0;
      t *= half_x / (a + 1.0);
      a += 1.0;
      sum += w * p;
      weight_used += w;
      if (1.0 - weight_used < 1e-12) break;
    }
  }
  // Downward from the mode: P(a-1) = P(a) + t(a-1), t(a-1) = t(a) * a / x.
  {
    double w = w_mode, p = p_mode, t = t_mode;
    double a = a_mode;
    for (long i = mode; i >= 1; --i) {
      w *= double(i) / half_l;
      t *= a / half_x;
      a -= 1.0;
      p += t;
      if (p > 1.0) p = 1.0;
      sum += w * p;
      weight_used += w;
      if (1.0 - weight_used < 1e-12) break;
    }
  }
  return std::min(1.0, sum);
}

}  // namespace isac
