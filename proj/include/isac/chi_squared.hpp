// Central and noncentral chi-squared distribution functions.
//
// The central CDF goes through the regularized lower incomplete gamma
// function (series expansion below a+1, continued fraction above). The
// noncentral CDF is the Poisson-weighted mixture of central CDFs, summed
// outward from the Poisson mode and truncated once the remaining mixture
// weight is below 1e-12. Quantiles invert the CDF by bisection to an
// absolute probability tolerance of 1e-12.

#pragma once

namespace isac {

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

// CDF of the central chi-squared distribution with dof degrees of freedom.
double chi_squared_cdf(int dof, double x);

// Inverse of chi_squared_cdf in its first argument; p in [0, 1).
double chi_squared_quantile(int dof, double p);

// CDF of the noncentral chi-squared distribution with dof degrees of
// freedom and noncentrality lambda >= 0.
double noncentral_chi_squared_cdf(int dof, double lambda, double x);

}  // namespace isac
