#pragma once

namespace trafficrl::stats {

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation with
/// the symmetry switch I_x(a, b) = 1 - I_{1-x}(b, a) for x > (a + 1) / (a + b + 2).
/// Throws std::domain_error outside x in [0, 1], a > 0, b > 0.
double reg_incomplete_beta(double x, double a, double b);

/// log I_x(a, b), accurate where I_x underflows or is tiny.
double log_reg_incomplete_beta(double x, double a, double b);

// Student t with `df` degrees of freedom: P(T > t) and its natural log.
double student_t_sf(double t, double df);
double log_student_t_sf(double t, double df);
double student_t_cdf(double t, double df);

// F distribution upper tail P(F > f).
double f_sf(double f, double df1, double df2);

double normal_cdf(double z);
double normal_sf(double z);
// Inverse of normal_cdf on (0, 1).
double normal_quantile(double p);

}  // namespace trafficrl::stats
