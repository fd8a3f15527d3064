#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace trafficrl::control {

// Action indices double as phases: 0 green, 1 red, 2 yellow.
inline constexpr int kActionCount = 3;

struct LightHold {
    int action = 0;   // action currently applied
    double t = 0.0;   // seconds it will have been held at the next decision
};

/// Minimum/maximum hold rules for every agent-controlled light.
///
/// `t` counts time in the current action. Each call to apply_constraints
/// accounts for one decision interval: it resets `t` when the applied action
/// changes, then adds the interval the new decision will stay in force.
struct ConstraintState {
    double t_min = 1.0;
    double t_max = 10.0;
    double interval = 0.1;
    std::vector<LightHold> lights;

    static ConstraintState initial(std::size_t light_count, int initial_action = 0, double t_min = 1.0,
                                   double t_max = 10.0, double interval = 0.1);
};

// Tolerance for comparing accumulated hold times against the thresholds.
inline constexpr double kHoldEpsilon = 1e-9;

// Best action other than `current` by Q-value; lowest index wins ties.
int next_best_action(std::span<const double> q_values, int current);

int apply_constraints(int proposed, std::span<const double> q_values, ConstraintState& cs, int light);

}  // namespace trafficrl::control

namespace trafficrl::control {

/// Independent observer of applied actions, one call per decision tick.
/// Counts holds that ended before t_min or ran past t_max.
class ConstraintAudit {
public:
    ConstraintAudit(std::size_t light_count, int initial_action, double t_min, double t_max, double interval);

    void record(std::span<const int> applied);

    long violations() const { return violations_; }
    long ticks() const { return ticks_; }

private:
    double t_min_;
    double t_max_;
    double interval_;
    std::vector<int> action_;
    std::vector<long> held_ticks_;
    long violations_ = 0;
    long ticks_ = 0;
};

}  // namespace trafficrl::control
