#include "trafficrl/stats/descriptive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trafficrl::stats {

double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean of an empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("sample variance needs at least two values");
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return ss / static_cast<double>(xs.size() - 1);
}

double median(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("median of an empty sample");
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    return n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

DescriptiveStats describe(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("cannot describe an empty sample");
    for (double x : xs) {
        if (!std::isfinite(x)) throw std::invalid_argument("sample contains a non-finite value");
    }
    DescriptiveStats d;
    d.n = xs.size();
    d.mean = mean(xs);
    if (d.n >= 2) {
        d.variance = sample_variance(xs);
        d.std_dev = std::sqrt(d.variance);
        d.spread_defined = true;
    }
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    d.min = *lo;
    d.max = *hi;
    d.median = median(xs);
    return d;
}

}  // namespace trafficrl::stats
