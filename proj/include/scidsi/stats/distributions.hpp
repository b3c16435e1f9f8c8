#pragma once

namespace scidsi::stats {

// Special functions. Domain violations throw DomainError.

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Regularized lower incomplete gamma P(a, x) and its complement Q(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

double normal_cdf(double x);
double normal_quantile(double p);

double student_t_cdf(double t, double dof);
/// P(|T| >= |t|) for T ~ t(dof).
double student_t_two_tailed(double t, double dof);
double student_t_quantile(double p, double dof);

double f_cdf(double x, double d1, double d2);
/// Upper tail P(F >= x), evaluated directly to keep small p-values accurate.
double f_sf(double x, double d1, double d2);

double chisq_cdf(double x, double k);
double chisq_sf(double x, double k);

}  // namespace scidsi::stats
