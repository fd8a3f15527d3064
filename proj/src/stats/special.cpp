#include "trafficrl/stats/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace trafficrl::stats {

namespace {

constexpr int kMaxIterations = 10000;
constexpr double kTiny = 1e-300;
constexpr double kEps = 1e-16;

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_continued_fraction(double x, double a, double b) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw std::runtime_error("incomplete beta continued fraction did not converge");
}

// log of x^a (1-x)^b / (a B(a, b))
double log_front_factor(double x, double a, double b) {
    return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x) -
           std::log(a);
}

void check_domain(double x, double a, double b) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("incomplete beta: x must lie in [0, 1]");
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("incomplete beta: a and b must be positive");
}

bool use_direct(double x, double a, double b) { return x < (a + 1.0) / (a + b + 2.0); }

}  // namespace

double reg_incomplete_beta(double x, double a, double b) {
    check_domain(x, a, b);
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    if (use_direct(x, a, b)) return std::exp(log_front_factor(x, a, b)) * beta_continued_fraction(x, a, b);
    return 1.0 - std::exp(log_front_factor(1.0 - x, b, a)) * beta_continued_fraction(1.0 - x, b, a);
}

double log_reg_incomplete_beta(double x, double a, double b) {
    check_domain(x, a, b);
    if (x == 0.0) return -std::numeric_limits<double>::infinity();
    if (x == 1.0) return 0.0;
    if (use_direct(x, a, b)) return log_front_factor(x, a, b) + std::log(beta_continued_fraction(x, a, b));
    return std::log1p(-std::exp(log_front_factor(1.0 - x, b, a)) * beta_continued_fraction(1.0 - x, b, a));
}

double log_student_t_sf(double t, double df) {
    if (!(df > 0.0)) throw std::domain_error("degrees of freedom must be positive");
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return t > 0 ? -std::numeric_limits<double>::infinity() : 0.0;
    const double x = df / (df + t * t);
    const double log_half_tail = std::log(0.5) + log_reg_incomplete_beta(x, 0.5 * df, 0.5);
    if (t >= 0.0) return log_half_tail;
    return std::log1p(-std::exp(log_half_tail));
}

double student_t_sf(double t, double df) { return std::exp(log_student_t_sf(t, df)); }

double student_t_cdf(double t, double df) { return student_t_sf(-t, df); }

double f_sf(double f, double df1, double df2) {
    if (!(df1 > 0.0) || !(df2 > 0.0)) throw std::domain_error("degrees of freedom must be positive");
    if (std::isnan(f)) return std::numeric_limits<double>::quiet_NaN();
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    return reg_incomplete_beta(df2 / (df2 + df1 * f), 0.5 * df2, 0.5 * df1);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        throw std::domain_error("normal quantile: p must lie in [0, 1]");
    }
    // Acklam's rational approximation (relative error ~1e-9) ...
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // ... then one Halley step against erfc brings it to full double precision.
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace trafficrl::stats
