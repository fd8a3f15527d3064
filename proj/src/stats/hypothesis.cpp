#include "trafficrl/stats/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "trafficrl/stats/descriptive.hpp"
#include "trafficrl/stats/special.hpp"

namespace trafficrl::stats {

std::string_view to_string(Tail t) { return t == Tail::Greater ? "greater" : "less"; }

namespace {

void require_size(std::span<const double> xs, std::size_t n, const char* what) {
    if (xs.size() < n) {
        throw std::invalid_argument(std::string(what) + " needs at least " + std::to_string(n) + " values, got " +
                                    std::to_string(xs.size()));
    }
}

// Fills t, p, log10_p for a statistic whose standard error may be zero.
void finish_test(TTestResult& r, double diff, double se) {
    if (se > 0.0) {
        r.t = diff / se;
        const double log_p = log_student_t_sf(r.tail == Tail::Greater ? r.t : -r.t, r.df);
        r.p = std::exp(log_p);
        r.log10_p = log_p / std::numbers::ln10;
        return;
    }
    r.degenerate = true;
    if (diff == 0.0) {
        r.t = 0.0;
        r.p = 0.5;
    } else {
        r.t = diff > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        const bool favours = (diff > 0.0) == (r.tail == Tail::Greater);
        r.p = favours ? 0.0 : 1.0;
    }
    r.log10_p = std::log10(r.p);
}

double cohens_d(double diff, double sp) {
    if (sp > 0.0) return diff / sp;
    if (diff == 0.0) return 0.0;
    return diff > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

double poly(std::span<const double> c, double x) {
    // c[0] + c[1] x + c[2] x^2 + ...
    double result = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) result = result * x + c[i];
    return result;
}

}  // namespace

double pooled_sd(std::span<const double> a, std::span<const double> b) {
    require_size(a, 2, "pooled sd");
    require_size(b, 2, "pooled sd");
    const double n1 = static_cast<double>(a.size());
    const double n2 = static_cast<double>(b.size());
    return std::sqrt(((n1 - 1.0) * sample_variance(a) + (n2 - 1.0) * sample_variance(b)) / (n1 + n2 - 2.0));
}

TTestResult student_t_test(std::span<const double> a, std::span<const double> b, Tail tail) {
    require_size(a, 2, "t test");
    require_size(b, 2, "t test");
    if (a.size() != b.size()) {
        throw std::invalid_argument("student_t_test assumes equal group sizes; use welch_t_test");
    }
    const double n = static_cast<double>(a.size());
    TTestResult r;
    r.tail = tail;
    r.df = 2.0 * n - 2.0;
    const double sp = pooled_sd(a, b);
    r.pooled_sd = sp;
    const double diff = mean(a) - mean(b);
    finish_test(r, diff, sp * std::sqrt(2.0 / n));
    r.cohens_d = cohens_d(diff, sp);
    return r;
}

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b, Tail tail) {
    require_size(a, 2, "t test");
    require_size(b, 2, "t test");
    const double n1 = static_cast<double>(a.size());
    const double n2 = static_cast<double>(b.size());
    const double v1 = sample_variance(a) / n1;
    const double v2 = sample_variance(b) / n2;
    TTestResult r;
    r.tail = tail;
    r.welch = true;
    const double se2 = v1 + v2;
    r.df = se2 > 0.0 ? se2 * se2 / (v1 * v1 / (n1 - 1.0) + v2 * v2 / (n2 - 1.0)) : n1 + n2 - 2.0;
    const double diff = mean(a) - mean(b);
    finish_test(r, diff, std::sqrt(se2));
    r.cohens_d = cohens_d(diff, pooled_sd(a, b));
    return r;
}

NormalityResult shapiro_wilk(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n < 3 || n > 5000) throw std::invalid_argument("shapiro_wilk requires 3 <= n <= 5000");
    std::vector<double> x(xs.begin(), xs.end());
    std::sort(x.begin(), x.end());
    const double range = x.back() - x.front();
    if (!(range > 1e-19 * std::max(1.0, std::abs(x.front())))) {
        throw DegenerateSampleError("shapiro_wilk: all values are identical");
    }

    // Half-vector of coefficients a_1..a_{n/2}, all positive.
    const std::size_t half = n / 2;
    std::vector<double> a(half);
    const double an = static_cast<double>(n);
    if (n == 3) {
        a[0] = std::numbers::sqrt2 / 2.0;
    } else {
        static constexpr double c1[] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
        static constexpr double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
        std::vector<double> m(half);
        double summ2 = 0.0;
        for (std::size_t i = 0; i < half; ++i) {
            m[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
            summ2 += m[i] * m[i];
        }
        summ2 *= 2.0;
        const double ssumm2 = std::sqrt(summ2);
        const double rsn = 1.0 / std::sqrt(an);
        const double a1 = poly(c1, rsn) - m[0] / ssumm2;
        std::size_t first_scaled;
        double fac;
        if (n > 5) {
            first_scaled = 2;
            const double a2 = -m[1] / ssumm2 + poly(c2, rsn);
            fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
            a[1] = a2;
        } else {
            first_scaled = 1;
            fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
        }
        a[0] = a1;
        for (std::size_t i = first_scaled; i < half; ++i) a[i] = -m[i] / fac;
    }

    // W on range-scaled data for numerical stability.
    double numerator = 0.0;
    for (std::size_t i = 0; i < half; ++i) numerator += a[i] * (x[n - 1 - i] - x[i]) / range;
    double mu = 0.0;
    for (double v : x) mu += v / range;
    mu /= an;
    double ss = 0.0;
    for (double v : x) ss += (v / range - mu) * (v / range - mu);
    double w = std::min(1.0, numerator * numerator / ss);

    NormalityResult result;
    result.w = w;
    if (n == 3) {
        constexpr double six_over_pi = 6.0 / std::numbers::pi;
        const double p = six_over_pi * (std::asin(std::sqrt(w)) - std::asin(std::sqrt(0.75)));
        result.p = std::clamp(p, 0.0, 1.0);
        return result;
    }
    const double w1 = 1.0 - w;
    if (w1 <= 0.0) {
        result.p = 1.0;
        return result;
    }
    double y = std::log(w1);
    double m, s;
    if (n <= 11) {
        static constexpr double g[] = {-2.273, 0.459};
        static constexpr double c3[] = {0.5440, -0.39978, 0.025054, -6.714e-4};
        static constexpr double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
        const double gamma = poly(g, an);
        if (y >= gamma) {
            result.p = 1e-99;
            return result;
        }
        y = -std::log(gamma - y);
        m = poly(c3, an);
        s = std::exp(poly(c4, an));
    } else {
        static constexpr double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
        static constexpr double c6[] = {-0.4803, -0.082676, 0.0030302};
        const double ln_n = std::log(an);
        m = poly(c5, ln_n);
        s = std::exp(poly(c6, ln_n));
    }
    result.p = normal_sf((y - m) / s);
    return result;
}

VarianceTestResult levene(std::span<const double> a, std::span<const double> b, LeveneCenter center) {
    require_size(a, 2, "levene");
    require_size(b, 2, "levene");
    auto deviations = [center](std::span<const double> g) {
        const double c = center == LeveneCenter::Mean ? mean(g) : median(g);
        std::vector<double> z;
        z.reserve(g.size());
        for (double v : g) z.push_back(std::abs(v - c));
        return z;
    };
    const auto za = deviations(a);
    const auto zb = deviations(b);
    const double na = static_cast<double>(za.size());
    const double nb = static_cast<double>(zb.size());
    const double ma = mean(za);
    const double mb = mean(zb);
    const double grand = (na * ma + nb * mb) / (na + nb);
    const double between = na * (ma - grand) * (ma - grand) + nb * (mb - grand) * (mb - grand);
    double within = 0.0;
    for (double z : za) within += (z - ma) * (z - ma);
    for (double z : zb) within += (z - mb) * (z - mb);

    VarianceTestResult r;
    r.df1 = 1.0;
    r.df2 = na + nb - 2.0;
    if (within > 0.0) {
        r.f = r.df2 * between / within;
    } else {
        r.f = between > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    r.p = f_sf(r.f, r.df1, r.df2);
    return r;
}

}  // namespace trafficrl::stats
