#ifndef SDLAB_DISTS_HPP
#define SDLAB_DISTS_HPP

namespace sdlab {

double log_gamma(double x);

/// Regularized incomplete beta function I_x(a, b), x in [0, 1].
double incomplete_beta(double a, double b, double x);

/// Standard normal CDF.
double normal_cdf(double z);

/// Two-sided normal tail probability for a z statistic.
double normal_p_two_sided(double z);

/// Student-t CDF with df degrees of freedom. Falls back to the normal CDF
/// above 1e6 degrees of freedom.
double student_t_cdf(double t, double df);

/// Two-sided p for a t statistic.
double student_t_p_two_sided(double t, double df);

/// Inverse CDF of the Student-t distribution (bisection on the CDF).
double student_t_quantile(double p, double df);

}  // namespace sdlab

#endif
