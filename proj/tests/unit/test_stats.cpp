#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "reference_tables.hpp"
#include "trafficrl/stats/comparison.hpp"
#include "trafficrl/stats/descriptive.hpp"
#include "trafficrl/stats/hypothesis.hpp"
#include "trafficrl/stats/special.hpp"

using namespace trafficrl::stats;
using reference::kFixedVehicles;
using reference::kFixedWait;
using reference::kMarlVehicles;
using reference::kMarlWait;

namespace {

std::vector<double> normal_sample(std::mt19937_64& gen, std::size_t n, double mu = 0.0, double sigma = 1.0) {
    std::normal_distribution<double> dist(mu, sigma);
    std::vector<double> xs(n);
    for (auto& x : xs) x = dist(gen);
    return xs;
}

// Beta CDF by direct quadrature of the density.
double beta_cdf_by_quadrature(double x, double a, double b) {
    boost::math::quadrature::tanh_sinh<double> integrator;
    const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    auto density = [&](double t) {
        if (t <= 0.0 || t >= 1.0) return 0.0;
        return std::exp((a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t) - log_beta);
    };
    return integrator.integrate(density, 0.0, x, 1e-14);
}

}  // namespace

TEST_SUITE("special functions") {
    TEST_CASE("incomplete beta boundaries and the uniform case") {
        CHECK(reg_incomplete_beta(0.0, 2.5, 3.0) == 0.0);
        CHECK(reg_incomplete_beta(1.0, 2.5, 3.0) == 1.0);
        CHECK(reg_incomplete_beta(0.5, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(reg_incomplete_beta(0.3, 1.0, 1.0) == doctest::Approx(0.3).epsilon(1e-14));
    }

    TEST_CASE("incomplete beta rejects bad domains") {
        CHECK_THROWS_AS(reg_incomplete_beta(-0.1, 1.0, 1.0), std::domain_error);
        CHECK_THROWS_AS(reg_incomplete_beta(1.1, 1.0, 1.0), std::domain_error);
        CHECK_THROWS_AS(reg_incomplete_beta(0.5, 0.0, 1.0), std::domain_error);
        CHECK_THROWS_AS(reg_incomplete_beta(0.5, 1.0, -2.0), std::domain_error);
    }

    TEST_CASE("incomplete beta matches quadrature of the density") {
        std::mt19937_64 gen(11);
        std::uniform_real_distribution<double> ux(0.01, 0.99), ua(1.0, 20.0);
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            const double x = ux(gen), a = ua(gen), b = ua(gen);
            worst = std::max(worst, std::abs(reg_incomplete_beta(x, a, b) - beta_cdf_by_quadrature(x, a, b)));
        }
        CHECK(worst < 1e-9);
    }

    TEST_CASE("incomplete beta reflection identity") {
        std::mt19937_64 gen(12);
        std::uniform_real_distribution<double> ux(0.0, 1.0), ua(0.05, 50.0);
        for (int i = 0; i < 1000; ++i) {
            const double x = ux(gen), a = ua(gen), b = ua(gen);
            CHECK(std::abs(reg_incomplete_beta(x, a, b) + reg_incomplete_beta(1.0 - x, b, a) - 1.0) < 1e-12);
        }
    }

    TEST_CASE("log incomplete beta agrees where the value is representable") {
        for (double x : {0.01, 0.2, 0.5, 0.9}) {
            CHECK(std::exp(log_reg_incomplete_beta(x, 3.0, 4.5)) ==
                  doctest::Approx(reg_incomplete_beta(x, 3.0, 4.5)).epsilon(1e-13));
        }
    }

    TEST_CASE("t distribution tails") {
        CHECK(student_t_sf(0.0, 7.0) == 0.5);
        // df = 1 is Cauchy: P(T > 1) = 1/4.
        CHECK(student_t_sf(1.0, 1.0) == doctest::Approx(0.25).epsilon(1e-13));
        // df = 2 closed form: P(T > t) = 1/2 - t / (2 sqrt(t^2 + 2)).
        CHECK(student_t_sf(1.5, 2.0) == doctest::Approx(0.5 - 1.5 / (2.0 * std::sqrt(4.25))).epsilon(1e-13));
        CHECK(student_t_sf(-1.5, 2.0) + student_t_sf(1.5, 2.0) == doctest::Approx(1.0).epsilon(1e-15));
        double prev = 1.0;
        for (double t = -5.0; t <= 5.0; t += 0.25) {
            const double p = student_t_sf(t, 9.0);
            CHECK(p < prev);
            prev = p;
        }
    }

    TEST_CASE("F tail for df1 = 1 equals the two-sided t tail") {
        for (double t : {0.3, 1.0, 2.2, 4.0}) {
            CHECK(f_sf(t * t, 1.0, 12.0) == doctest::Approx(2.0 * student_t_sf(t, 12.0)).epsilon(1e-12));
        }
        CHECK(f_sf(0.0, 1.0, 5.0) == 1.0);
    }

    TEST_CASE("normal quantile inverts the cdf") {
        for (double p : {1e-12, 1e-5, 0.01, 0.3, 0.5, 0.77, 0.99, 1.0 - 1e-9}) {
            CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
        }
        CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
    }
}

TEST_SUITE("descriptive") {
    TEST_CASE("reference vehicles column") {
        const auto d = describe(kFixedVehicles);
        CHECK(d.n == 20);
        CHECK(d.mean == doctest::Approx(1146.40).epsilon(1e-12));
        CHECK(std::abs(d.std_dev - 1.54) <= 0.01);
        CHECK(std::abs(d.variance - 2.36) <= 0.01);
        CHECK(d.min == 1143.0);
        CHECK(d.max == 1149.0);
        CHECK(d.median == 1146.0);
    }

    TEST_CASE("reference wait column") {
        const auto d = describe(kMarlWait);
        CHECK(std::abs(d.mean - 1144.77) <= 0.01);
        CHECK(std::abs(d.variance - 694.74) <= 0.01);
        CHECK(std::abs(d.median - 1146.71) <= 0.01);
        CHECK(d.min == 1104.94);
        CHECK(d.max == 1208.07);
    }

    TEST_CASE("singleton has no spread") {
        const std::vector<double> one{5.0};
        const auto d = describe(one);
        CHECK(d.mean == 5.0);
        CHECK(d.median == 5.0);
        CHECK(d.std_dev == 0.0);
        CHECK_FALSE(d.spread_defined);
    }

    TEST_CASE("empty or non-finite samples are rejected") {
        CHECK_THROWS_AS(describe(std::vector<double>{}), std::invalid_argument);
        CHECK_THROWS_AS(describe(std::vector<double>{1.0, NAN}), std::invalid_argument);
    }

    TEST_CASE("ordering invariant min <= median <= max") {
        std::mt19937_64 gen(3);
        for (int i = 0; i < 50; ++i) {
            const auto xs = normal_sample(gen, 1 + i % 9, 10.0, 3.0);
            const auto d = describe(xs);
            CHECK(d.min <= d.median);
            CHECK(d.median <= d.max);
            CHECK(d.std_dev >= 0.0);
        }
    }
}

TEST_SUITE("t tests") {
    TEST_CASE("pooled sd") {
        // From the published variances 2.36 and 1.71 with n = 20 each.
        const double from_table = std::sqrt((19.0 * 2.36 + 19.0 * 1.71) / 38.0);
        CHECK(from_table == doctest::Approx(1.4266).epsilon(1e-4));
        CHECK(pooled_sd(kMarlVehicles, kFixedVehicles) == doctest::Approx(1.42653).epsilon(1e-4));

        CHECK(pooled_sd(kFixedWait, kFixedWait) == doctest::Approx(std::sqrt(sample_variance(kFixedWait))));
        const std::vector<double> c1{3, 3, 3}, c2{7, 7, 7, 7};
        CHECK(pooled_sd(c1, c2) == 0.0);
        CHECK_THROWS_AS(pooled_sd(std::vector<double>{1.0}, c2), std::invalid_argument);
    }

    TEST_CASE("student t on the vehicles columns") {
        const auto r = student_t_test(kMarlVehicles, kFixedVehicles, Tail::Greater);
        CHECK(std::abs(r.t - 14.96) <= 0.01);
        CHECK(r.df == 38.0);
        CHECK(std::abs(r.cohens_d - 4.73) <= 0.01);
        CHECK(std::abs(r.log10_p - std::log10(8.20e-18)) <= 0.5);
        CHECK(r.pooled_sd.has_value());
        CHECK_FALSE(r.welch);
    }

    TEST_CASE("welch t on the wait columns") {
        const auto r = welch_t_test(kMarlWait, kFixedWait, Tail::Less);
        CHECK(std::abs(r.t - (-209.11)) <= 0.05);
        CHECK(std::abs(r.df - 22.70) <= 0.05);
        CHECK(std::abs(r.cohens_d - (-66.13)) <= 0.05);
        CHECK(std::abs(r.log10_p - std::log10(4.30e-39)) <= 0.5);
        CHECK(r.welch);
    }

    TEST_CASE("identical samples give t = 0 and p = 1/2") {
        const auto r = student_t_test(kFixedWait, kFixedWait, Tail::Greater);
        CHECK(r.t == 0.0);
        CHECK(r.p == 0.5);
        const auto w = welch_t_test(kFixedWait, kFixedWait, Tail::Less);
        CHECK(w.p == 0.5);
    }

    TEST_CASE("swapping groups and flipping the tail keeps p") {
        const auto a = student_t_test(kMarlWait, kFixedWait, Tail::Less);
        const auto b = student_t_test(kFixedWait, kMarlWait, Tail::Greater);
        CHECK(a.p == doctest::Approx(b.p).epsilon(1e-12));
        CHECK(a.t == -b.t);
    }

    TEST_CASE("unequal sizes are directed to welch") {
        const std::vector<double> a{1, 2, 3}, b{1, 2, 3, 4};
        CHECK_THROWS_WITH_AS(student_t_test(a, b, Tail::Greater), doctest::Contains("welch"), std::invalid_argument);
        CHECK_NOTHROW(welch_t_test(a, b, Tail::Greater));
    }

    TEST_CASE("student t against explicit sums") {
        std::mt19937_64 gen(21);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t n = 3 + trial % 25;
            const auto a = normal_sample(gen, n, 5.0, 1.0 + trial % 4);
            const auto b = normal_sample(gen, n, 4.5, 2.0);
            double sa = 0, sb = 0;
            for (std::size_t i = 0; i < n; ++i) {
                sa += a[i];
                sb += b[i];
            }
            const double ma = sa / n, mb = sb / n;
            double qa = 0, qb = 0;
            for (std::size_t i = 0; i < n; ++i) {
                qa += (a[i] - ma) * (a[i] - ma);
                qb += (b[i] - mb) * (b[i] - mb);
            }
            const double sp = std::sqrt((qa + qb) / (2.0 * n - 2.0));
            const double t = (ma - mb) / (sp * std::sqrt(2.0 / n));
            const auto r = student_t_test(a, b, Tail::Greater);
            CHECK(std::abs(r.t - t) <= 1e-12 * std::abs(t));
            CHECK(std::abs(r.cohens_d - (ma - mb) / sp) <= 1e-12 * std::abs((ma - mb) / sp));
        }
    }

    TEST_CASE("welch reduces to student when variances and sizes match") {
        const std::vector<double> a{1.0, 2.0, 3.0, 4.0, 5.0};
        const std::vector<double> b{2.5, 3.5, 4.5, 5.5, 6.5};
        const auto s = student_t_test(a, b, Tail::Less);
        const auto w = welch_t_test(a, b, Tail::Less);
        CHECK(w.t == doctest::Approx(s.t).epsilon(1e-14));
        CHECK(w.df == doctest::Approx(s.df).epsilon(1e-14));
        CHECK(w.p == doctest::Approx(s.p).epsilon(1e-12));
    }

    TEST_CASE("welch df lies between min(n)-1 and n1+n2-2") {
        std::mt19937_64 gen(5);
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t n1 = 2 + trial % 17, n2 = 2 + (trial * 7) % 23;
            const auto a = normal_sample(gen, n1, 0.0, 0.2 + trial % 5);
            const auto b = normal_sample(gen, n2, 0.0, 1.0);
            const auto r = welch_t_test(a, b, Tail::Greater);
            CHECK(r.df >= static_cast<double>(std::min(n1, n2)) - 1.0 - 1e-9);
            CHECK(r.df <= static_cast<double>(n1 + n2) - 2.0 + 1e-9);
        }
    }

    TEST_CASE("one-tailed p is monotone in t and the d sign follows the mean difference") {
        std::mt19937_64 gen(8);
        const auto base = normal_sample(gen, 12);
        double prev_p = 1.0;
        for (double shift = -3.0; shift <= 3.0; shift += 0.5) {
            auto a = base;
            for (auto& x : a) x += shift;
            const auto r = welch_t_test(a, base, Tail::Greater);
            CHECK(r.p <= prev_p);
            prev_p = r.p;
            if (shift != 0.0) CHECK((r.cohens_d > 0.0) == (shift > 0.0));
        }
    }

    TEST_CASE("zero variance with different means is a flagged limit") {
        const std::vector<double> a{2, 2, 2}, b{1, 1, 1};
        const auto r = welch_t_test(a, b, Tail::Greater);
        CHECK(r.degenerate);
        CHECK(r.p == 0.0);
        CHECK(welch_t_test(a, b, Tail::Less).p == 1.0);
        const auto same = welch_t_test(a, a, Tail::Less);
        CHECK(same.degenerate);
        CHECK(same.p == 0.5);
    }
}

TEST_SUITE("shapiro-wilk") {
    TEST_CASE("reference columns") {
        const struct {
            const std::vector<double>* xs;
            double w, p;
        } cases[] = {{&kFixedVehicles, 0.939, 0.225},
                     {&kMarlVehicles, 0.906, 0.053},
                     {&kFixedWait, 0.960, 0.537},
                     {&kMarlWait, 0.966, 0.679}};
        for (const auto& c : cases) {
            const auto r = shapiro_wilk(*c.xs);
            CHECK(std::abs(r.w - c.w) <= 0.005);
            CHECK(std::abs(r.p - c.p) <= 0.02);
        }
    }

    TEST_CASE("small-sample branches") {
        // Expected values from an independent implementation of the same algorithm.
        const struct {
            std::vector<double> xs;
            double w, p;
        } cases[] = {
            {{1.0, 2.0, 4.0}, 0.9642857142857142, 0.6368868450289689},
            {{2.1, 3.4, 1.9, 5.6, 4.4}, 0.9320849391953863, 0.6106559022604845},
            {{0.3, 1.2, -0.7, 2.5, 0.9, 1.1, -1.4, 0.2}, 0.9752303238629743, 0.9355921560582654},
            {{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 30}, 0.732129826757183, 0.0017500812993306624},
        };
        for (const auto& c : cases) {
            const auto r = shapiro_wilk(c.xs);
            CHECK(r.w == doctest::Approx(c.w).epsilon(1e-5));
            CHECK(r.p == doctest::Approx(c.p).epsilon(1e-3));
        }
    }

    TEST_CASE("W is invariant under positive affine maps") {
        auto xs = kFixedWait;
        const auto before = shapiro_wilk(xs);
        for (auto& x : xs) x = 2.0 * x + 7.0;
        const auto after = shapiro_wilk(xs);
        CHECK(after.w == doctest::Approx(before.w).epsilon(1e-12));
    }

    TEST_CASE("an extreme outlier lowers W") {
        std::mt19937_64 gen(99);
        for (int trial = 0; trial < 20; ++trial) {
            auto xs = normal_sample(gen, 30);
            const double w0 = shapiro_wilk(xs).w;
            xs.push_back(25.0);
            CHECK(shapiro_wilk(xs).w < w0);
        }
    }

    TEST_CASE("degenerate and out-of-range samples") {
        CHECK_THROWS_AS(shapiro_wilk(std::vector<double>{4, 4, 4, 4}), DegenerateSampleError);
        CHECK_THROWS_AS(shapiro_wilk(std::vector<double>{1, 2}), std::invalid_argument);
    }

    TEST_CASE("W and p stay in range") {
        std::mt19937_64 gen(4);
        std::exponential_distribution<double> expo(1.0);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> xs(3 + trial);
            for (auto& x : xs) x = expo(gen);
            const auto r = shapiro_wilk(xs);
            CHECK(r.w > 0.0);
            CHECK(r.w <= 1.0);
            CHECK(r.p >= 0.0);
            CHECK(r.p <= 1.0);
        }
    }
}

TEST_SUITE("levene") {
    TEST_CASE("reference columns, median centered") {
        const auto v = levene(kMarlVehicles, kFixedVehicles);
        CHECK(std::abs(v.f - 0.221) <= 0.05);
        CHECK(std::abs(v.p - 0.641) <= 0.02);
        const auto w = levene(kMarlWait, kFixedWait);
        CHECK(std::abs(w.f - 15.43) <= 0.3);
        CHECK(std::abs(std::log10(w.p) - std::log10(3.50e-4)) <= 0.5);
    }

    TEST_CASE("mean-centered variant") {
        // Hand-checked: deviations {1.5, .5, .5, 1.5} vs {2.625, .625, 1.375, 3.875}.
        const std::vector<double> a{1, 2, 3, 4}, b{2, 4, 6, 8.5};
        const auto r = levene(a, b, LeveneCenter::Mean);
        CHECK(r.f == doctest::Approx(2.479591836734694).epsilon(1e-12));
        CHECK(r.p == doctest::Approx(0.16639929285991026).epsilon(1e-9));
    }

    TEST_CASE("identical groups give F = 0") {
        const auto r = levene(kFixedWait, kFixedWait);
        CHECK(r.f == 0.0);
        CHECK(r.p == 1.0);
    }

    TEST_CASE("shift invariance") {
        auto a = kMarlWait;
        auto b = kFixedWait;
        const auto before = levene(a, b, LeveneCenter::Mean);
        for (auto& x : a) x += 1000.0;
        for (auto& x : b) x += 1000.0;
        CHECK(levene(a, b, LeveneCenter::Mean).f == doctest::Approx(before.f).epsilon(1e-9));
    }

    TEST_CASE("groups need two values") {
        CHECK_THROWS_AS(levene(std::vector<double>{1.0}, kFixedWait), std::invalid_argument);
    }
}

TEST_SUITE("comparison") {
    TEST_CASE("reference tables reproduce the published analysis") {
        const RunColumns fixed{kFixedVehicles, kFixedWait};
        const RunColumns marl{kMarlVehicles, kMarlWait};
        const auto report = run_full_comparison(fixed, marl);
        REQUIRE(report.metrics.size() == 2);

        const auto& veh = report.metrics[0];
        CHECK(veh.metric == "vehicles_passed");
        CHECK(veh.equal_variances);
        CHECK(veh.test_used == "student");
        CHECK(std::abs(veh.test.t - 14.96) <= 0.01);
        CHECK(veh.reject_null);
        CHECK(std::abs(veh.percent_change - 0.59) <= 0.01);

        const auto& wait = report.metrics[1];
        CHECK_FALSE(wait.equal_variances);
        CHECK(wait.test_used == "welch");
        CHECK(std::abs(wait.test.t + 209.11) <= 0.05);
        CHECK(wait.reject_null);
        CHECK(std::abs(wait.percent_change + 78.25) <= 0.01);

        const auto j = to_json(report);
        CHECK(j["metrics"][1]["t_test"]["test"] == "welch");
        CHECK(to_text(report).find("Welch t(22.70) = -209.11") != std::string::npos);
    }

    TEST_CASE("fixed against itself retains both nulls") {
        const RunColumns fixed{kFixedVehicles, kFixedWait};
        const auto report = run_full_comparison(fixed, fixed);
        for (const auto& m : report.metrics) {
            CHECK(m.test.p == 0.5);
            CHECK_FALSE(m.reject_null);
        }
    }

    TEST_CASE("too few runs") {
        const RunColumns small{{1, 2}, {3, 4}};
        const RunColumns fixed{kFixedVehicles, kFixedWait};
        CHECK_THROWS_AS(run_full_comparison(fixed, small), std::invalid_argument);
    }

    TEST_CASE("constant columns skip normality instead of failing") {
        const RunColumns fixed{{10, 10, 10, 10}, {1, 2, 3, 4}};
        const RunColumns marl{{11, 12, 11, 12}, {0.5, 0.7, 0.6, 0.9}};
        const auto report = run_full_comparison(fixed, marl);
        CHECK_FALSE(report.metrics[0].normality_fixed.has_value());
        CHECK(report.metrics[0].normality_marl.has_value());
    }
}
