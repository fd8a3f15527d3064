#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>

namespace trafficrl::stats {

// Raised for samples whose statistic is undefined (e.g. all values equal).
class DegenerateSampleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Direction of the one-tailed alternative for mean(a) - mean(b).
enum class Tail { Greater, Less };

std::string_view to_string(Tail t);

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p = 0.5;          // one-tailed
    double log10_p = 0.0;    // kept separately so tiny tails survive
    Tail tail = Tail::Greater;
    std::optional<double> pooled_sd;  // only for the equal-variance test
    double cohens_d = 0.0;            // (mean_a - mean_b) / pooled sd
    bool welch = false;
    bool degenerate = false;  // zero standard error; p is a limiting value
};

struct NormalityResult {
    double w = 1.0;
    double p = 1.0;
};

struct VarianceTestResult {
    double f = 0.0;
    double p = 1.0;
    double df1 = 1.0;
    double df2 = 1.0;
};

// sqrt(((n1 - 1) s1^2 + (n2 - 1) s2^2) / (n1 + n2 - 2)); both sizes >= 2.
double pooled_sd(std::span<const double> a, std::span<const double> b);

/// Equal-variance two-sample t test for equal group sizes:
/// t = (mean_a - mean_b) / (s_p * sqrt(2 / n)), df = 2n - 2.
/// Unequal sizes are rejected; use welch_t_test for those.
TTestResult student_t_test(std::span<const double> a, std::span<const double> b, Tail tail);

/// Unequal-variance t test with Welch-Satterthwaite degrees of freedom.
/// Cohen's d still uses the pooled standard deviation.
TTestResult welch_t_test(std::span<const double> a, std::span<const double> b, Tail tail);

/// Shapiro-Wilk W and p-value (Royston's approximation), 3 <= n <= 5000.
/// Throws DegenerateSampleError when every value is the same.
NormalityResult shapiro_wilk(std::span<const double> xs);

enum class LeveneCenter { Mean, Median };

/// Levene's test for two groups: one-way ANOVA on absolute deviations from
/// each group's center. Median centering is the Brown-Forsythe variant.
VarianceTestResult levene(std::span<const double> a, std::span<const double> b,
                          LeveneCenter center = LeveneCenter::Median);

}  // namespace trafficrl::stats
