#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trafficrl/stats/descriptive.hpp"
#include "trafficrl/stats/hypothesis.hpp"

namespace trafficrl::stats {

// Per-run metric columns for one controller.
struct RunColumns {
    std::vector<double> vehicles_passed;
    std::vector<double> wait_time;
};

struct MetricReport {
    std::string metric;
    std::string alternative;  // H1, stated for MARL relative to fixed-time
    Tail tail = Tail::Greater;
    DescriptiveStats fixed;
    DescriptiveStats marl;
    std::optional<NormalityResult> normality_fixed;  // absent for constant samples
    std::optional<NormalityResult> normality_marl;
    VarianceTestResult levene;
    bool equal_variances = true;
    std::string test_used;  // "student" or "welch"
    TTestResult test;
    double difference = 0.0;      // mean_marl - mean_fixed
    double percent_change = 0.0;  // relative to the fixed-time mean
    bool reject_null = false;
};

struct TestReport {
    double alpha = 0.05;
    LeveneCenter levene_center = LeveneCenter::Median;
    std::vector<MetricReport> metrics;
};

/// Two-controller comparison: describe, Shapiro-Wilk per group, Levene across
/// groups, then a one-tailed Student test when variances look equal (Levene
/// p >= alpha) or Welch otherwise. MARL is group a, fixed-time group b;
/// vehicles passed is tested for "greater", wait time for "less".
TestReport run_full_comparison(const RunColumns& fixed, const RunColumns& marl, double alpha = 0.05,
                               LeveneCenter center = LeveneCenter::Median);

nlohmann::ordered_json to_json(const TestReport& report);
std::string to_text(const TestReport& report);

}  // namespace trafficrl::stats
