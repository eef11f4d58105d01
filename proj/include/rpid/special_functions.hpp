#pragma once

namespace rpid {
namespace sf {

double log_gamma(double x);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double reg_inc_gamma_lower(double a, double x);

/// Inverse of P(a, .) in x for p in [0, 1].
double inv_reg_inc_gamma_lower(double a, double p);

/// Regularized incomplete beta I_x(a, b).
double reg_inc_beta(double a, double b, double x);

/// CDF of Student's t with df degrees of freedom.
double student_t_cdf(double t, double df);

double normal_cdf(double z);

/// Survival function of the Kolmogorov distribution:
/// Q(lambda) = 2 * sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_sf(double lambda);

/// Quantile of Gamma(shape, rate) at probability u.
double gamma_quantile(double shape, double rate, double u);

}  // namespace sf
}  // namespace rpid
