#include "trafficrl/stats/comparison.hpp"

#include <cstdio>
#include <stdexcept>

namespace trafficrl::stats {

namespace {

constexpr std::size_t kMinRuns = 3;

std::optional<NormalityResult> try_shapiro(const std::vector<double>& xs) {
    try {
        return shapiro_wilk(xs);
    } catch (const DegenerateSampleError&) {
        return std::nullopt;
    }
}

MetricReport compare_metric(std::string name, std::string alternative, Tail tail, const std::vector<double>& fixed,
                            const std::vector<double>& marl, double alpha, LeveneCenter center) {
    if (fixed.size() < kMinRuns || marl.size() < kMinRuns) {
        throw std::invalid_argument("metric '" + name + "' needs at least " + std::to_string(kMinRuns) +
                                    " runs per controller (got " + std::to_string(fixed.size()) + " fixed, " +
                                    std::to_string(marl.size()) + " marl)");
    }
    MetricReport r;
    r.metric = std::move(name);
    r.alternative = std::move(alternative);
    r.tail = tail;
    r.fixed = describe(fixed);
    r.marl = describe(marl);
    r.normality_fixed = try_shapiro(fixed);
    r.normality_marl = try_shapiro(marl);
    r.levene = levene(marl, fixed, center);
    r.equal_variances = !(r.levene.p < alpha);
    if (r.equal_variances && fixed.size() == marl.size()) {
        r.test_used = "student";
        r.test = student_t_test(marl, fixed, tail);
    } else {
        r.test_used = "welch";
        r.test = welch_t_test(marl, fixed, tail);
    }
    r.difference = r.marl.mean - r.fixed.mean;
    r.percent_change = r.fixed.mean != 0.0 ? 100.0 * r.difference / r.fixed.mean : 0.0;
    r.reject_null = r.test.p < alpha;
    return r;
}

nlohmann::ordered_json describe_json(const DescriptiveStats& d) {
    nlohmann::ordered_json j;
    j["n"] = d.n;
    j["mean"] = d.mean;
    j["std_dev"] = d.std_dev;
    j["variance"] = d.variance;
    j["min"] = d.min;
    j["max"] = d.max;
    j["median"] = d.median;
    return j;
}

nlohmann::ordered_json normality_json(const std::optional<NormalityResult>& n) {
    if (!n) return nullptr;
    return {{"W", n->w}, {"p", n->p}};
}

std::string format(const char* fmt, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

std::string normality_text(const std::optional<NormalityResult>& n) {
    if (!n) return "n/a (constant sample)";
    return format("W = %.3f, p = %.3f", n->w, n->p);
}

}  // namespace

TestReport run_full_comparison(const RunColumns& fixed, const RunColumns& marl, double alpha, LeveneCenter center) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    TestReport report;
    report.alpha = alpha;
    report.levene_center = center;
    report.metrics.push_back(compare_metric("vehicles_passed", "mu_marl > mu_fixed", Tail::Greater,
                                            fixed.vehicles_passed, marl.vehicles_passed, alpha, center));
    report.metrics.push_back(compare_metric("wait_time_s", "mu_marl < mu_fixed", Tail::Less, fixed.wait_time,
                                            marl.wait_time, alpha, center));
    return report;
}

nlohmann::ordered_json to_json(const TestReport& report) {
    nlohmann::ordered_json j;
    j["alpha"] = report.alpha;
    j["levene_center"] = report.levene_center == LeveneCenter::Median ? "median" : "mean";
    auto& metrics = j["metrics"] = nlohmann::ordered_json::array();
    for (const auto& m : report.metrics) {
        nlohmann::ordered_json e;
        e["metric"] = m.metric;
        e["alternative"] = m.alternative;
        e["fixed"] = describe_json(m.fixed);
        e["marl"] = describe_json(m.marl);
        e["shapiro_wilk"] = {{"fixed", normality_json(m.normality_fixed)}, {"marl", normality_json(m.normality_marl)}};
        e["levene"] = {{"F", m.levene.f}, {"p", m.levene.p}, {"df1", m.levene.df1}, {"df2", m.levene.df2}};
        e["equal_variances"] = m.equal_variances;
        nlohmann::ordered_json t;
        t["test"] = m.test_used;
        t["tail"] = to_string(m.tail);
        t["t"] = m.test.t;
        t["df"] = m.test.df;
        t["p"] = m.test.p;
        t["log10_p"] = m.test.log10_p;
        t["pooled_sd"] = m.test.pooled_sd ? nlohmann::ordered_json(*m.test.pooled_sd) : nlohmann::ordered_json(nullptr);
        t["cohens_d"] = m.test.cohens_d;
        t["degenerate"] = m.test.degenerate;
        e["t_test"] = t;
        e["difference"] = m.difference;
        e["percent_change"] = m.percent_change;
        e["reject_null"] = m.reject_null;
        metrics.push_back(e);
    }
    return j;
}

std::string to_text(const TestReport& report) {
    std::string out;
    out += format("Controller comparison (alpha = %.2f, Levene centered on the %s)\n", report.alpha,
                  report.levene_center == LeveneCenter::Median ? "median" : "mean");
    for (const auto& m : report.metrics) {
        out += "\n== " + m.metric + " ==\n";
        out += "H1: " + m.alternative + "\n";
        out += format("%-10s %12s %12s\n", "", "fixed", "marl");
        out += format("%-10s %12.2f %12.2f\n", "mean", m.fixed.mean, m.marl.mean);
        out += format("%-10s %12.2f %12.2f\n", "std dev", m.fixed.std_dev, m.marl.std_dev);
        out += format("%-10s %12.2f %12.2f\n", "variance", m.fixed.variance, m.marl.variance);
        out += format("%-10s %12.2f %12.2f\n", "min", m.fixed.min, m.marl.min);
        out += format("%-10s %12.2f %12.2f\n", "max", m.fixed.max, m.marl.max);
        out += format("%-10s %12.2f %12.2f\n", "median", m.fixed.median, m.marl.median);
        out += "Shapiro-Wilk fixed: " + normality_text(m.normality_fixed) + "\n";
        out += "Shapiro-Wilk marl:  " + normality_text(m.normality_marl) + "\n";
        out += format("Levene: F = %.3f, p = %.3g -> %s variances\n", m.levene.f, m.levene.p,
                      m.equal_variances ? "equal" : "unequal");
        out += format("%s t(%.2f) = %.2f, one-tailed p = %.3g (log10 p = %.2f), Cohen's d = %.2f\n",
                      m.test_used == "student" ? "Student" : "Welch", m.test.df, m.test.t, m.test.p, m.test.log10_p,
                      m.test.cohens_d);
        out += format("Difference: %.2f (%+.2f%%) -> %s H0\n", m.difference, m.percent_change,
                      m.reject_null ? "reject" : "retain");
    }
    return out;
}

}  // namespace trafficrl::stats
