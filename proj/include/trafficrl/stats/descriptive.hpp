#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace trafficrl::stats {

struct Sample {
    std::vector<double> values;
    std::string label;
};

struct DescriptiveStats {
    std::size_t n = 0;
    double mean = 0.0;
    double std_dev = 0.0;   // n - 1 denominator; 0 when n == 1
    double variance = 0.0;
    bool spread_defined = false;  // false for a single observation
    double min = 0.0;
    double max = 0.0;
    double median = 0.0;
};

double mean(std::span<const double> xs);
// Unbiased (n - 1) variance; requires n >= 2.
double sample_variance(std::span<const double> xs);
double median(std::span<const double> xs);

// Throws std::invalid_argument on an empty or non-finite sample.
DescriptiveStats describe(std::span<const double> xs);
inline DescriptiveStats describe(const Sample& s) { return describe(s.values); }

}  // namespace trafficrl::stats
