#include "trafficrl/control/constraints.hpp"

#include <stdexcept>

namespace trafficrl::control {

ConstraintState ConstraintState::initial(std::size_t light_count, int initial_action, double t_min,
                                         double t_max, double interval) {
    if (!(t_min >= 0.0) || !(t_max >= t_min) || !(interval > 0.0)) {
        throw std::invalid_argument("constraint timing requires 0 <= t_min <= t_max and interval > 0");
    }
    ConstraintState cs;
    cs.t_min = t_min;
    cs.t_max = t_max;
    cs.interval = interval;
    cs.lights.assign(light_count, LightHold{initial_action, 0.0});
    return cs;
}

int next_best_action(std::span<const double> q_values, int current) {
    int best = -1;
    for (int a = 0; a < static_cast<int>(q_values.size()); ++a) {
        if (a == current) continue;
        if (best < 0 || q_values[a] > q_values[best]) best = a;
    }
    return best;
}

int apply_constraints(int proposed, std::span<const double> q_values, ConstraintState& cs, int light) {
    if (q_values.size() != static_cast<std::size_t>(kActionCount)) {
        throw std::invalid_argument("expected one Q-value per action");
    }
    if (proposed < 0 || proposed >= kActionCount) throw std::invalid_argument("action out of range");
    auto& hold = cs.lights.at(static_cast<std::size_t>(light));

    int applied = proposed;
    if (hold.t < cs.t_min - kHoldEpsilon) {
        applied = hold.action;
    } else if (hold.t >= cs.t_max - kHoldEpsilon) {
        applied = next_best_action(q_values, hold.action);
    }

    if (applied != hold.action) {
        hold.action = applied;
        hold.t = 0.0;
    }
    hold.t += cs.interval;
    return applied;
}

}  // namespace trafficrl::control

namespace trafficrl::control {

ConstraintAudit::ConstraintAudit(std::size_t light_count, int initial_action, double t_min, double t_max,
                                 double interval)
    : t_min_(t_min), t_max_(t_max), interval_(interval), action_(light_count, initial_action),
      held_ticks_(light_count, 0) {}

void ConstraintAudit::record(std::span<const int> applied) {
    if (applied.size() != action_.size()) throw std::invalid_argument("audit light count mismatch");
    for (std::size_t i = 0; i < applied.size(); ++i) {
        if (applied[i] != action_[i]) {
            if (static_cast<double>(held_ticks_[i]) * interval_ < t_min_ - kHoldEpsilon) ++violations_;
            action_[i] = applied[i];
            held_ticks_[i] = 0;
        }
        ++held_ticks_[i];
        if (static_cast<double>(held_ticks_[i]) * interval_ > t_max_ + kHoldEpsilon) ++violations_;
    }
    ++ticks_;
}

}  // namespace trafficrl::control
