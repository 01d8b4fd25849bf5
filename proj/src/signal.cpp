#include "intersim/signal.hpp"

#include <cmath>

namespace intersim {

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::NSA: return "NSA";
        case Phase::NSLA: return "NSLA";
        case Phase::EWA: return "EWA";
        case Phase::EWLA: return "EWLA";
    }
    return "?";
}

bool phase_serves(Phase p, Movement m) {
    bool ns = m.from == Approach::North || m.from == Approach::South;
    switch (p) {
        case Phase::NSA: return ns && m.turn != Turn::Left;
        case Phase::NSLA: return ns && m.turn == Turn::Left;
        case Phase::EWA: return !ns && m.turn != Turn::Left;
        case Phase::EWLA: return !ns && m.turn == Turn::Left;
    }
    return false;
}

SignalColor signal_color(const SignalState& s, Movement m) {
    if (s.yellow)
        return phase_serves(s.phase, m) ? SignalColor::Yellow : SignalColor::Red;
    return phase_serves(s.phase, m) ? SignalColor::Green : SignalColor::Red;
}

std::vector<SignalInterval> advance_signal(const SignalState& s, Phase chosen,
                                           const SignalTiming& t) {
    if (s.yellow || s.remaining > 1e-9)
        throw ContractViolation("advance_signal: not at a decision epoch");

    std::vector<SignalInterval> out;
    if (chosen != s.phase) {
        SignalState y;
        y.phase = s.phase;
        y.pending = chosen;
        y.yellow = true;
        y.remaining = t.yellow;
        out.push_back({y, t.yellow});
    }
    SignalState g;
    g.phase = chosen;
    g.pending = chosen;
    g.yellow = false;
    g.remaining = t.green_unit;
    out.push_back({g, t.green_unit});
    return out;
}

SignalMachine::SignalMachine(Phase initial, SignalTiming t) : timing_(t) {
    state_.phase = initial;
    state_.pending = initial;
    state_.yellow = false;
    state_.remaining = t.green_unit;
}

bool SignalMachine::at_decision_epoch() const {
    return !state_.yellow && state_.remaining <= 1e-9 && queued_.empty();
}

void SignalMachine::choose(Phase p) {
    if (!at_decision_epoch())
        throw ContractViolation("SignalMachine::choose: not at a decision epoch");
    auto plan = advance_signal(state_, p, timing_);
    state_ = plan.front().state;
    queued_.assign(plan.begin() + 1, plan.end());
}

void SignalMachine::tick(double dt) {
    if (at_decision_epoch())
        throw ContractViolation("SignalMachine::tick: decision epoch not resolved");
    state_.remaining -= dt;
    while (state_.remaining <= 1e-9 && !queued_.empty()) {
        double carry = -state_.remaining;
        state_ = queued_.front().state;
        queued_.erase(queued_.begin());
        state_.remaining -= carry;
    }
    if (state_.remaining < 0.0) state_.remaining = 0.0;
}

SignalState fixed_time_next(double clock) {
    double c = std::fmod(clock, kFixedCycle);
    if (c < 0.0) c += kFixedCycle;

    struct Leg {
        Phase phase;
        double green;
    };
    static const Leg plan[] = {{Phase::NSA, 25.0},
                               {Phase::NSLA, 12.0},
                               {Phase::EWA, 25.0},
                               {Phase::EWLA, 12.0}};
    const double yellow = 4.0;

    double t0 = 0.0;
    for (int i = 0; i < 4; ++i) {
        const Leg& leg = plan[i];
        if (c < t0 + leg.green) {
            SignalState s;
            s.phase = leg.phase;
            s.pending = leg.phase;
            s.yellow = false;
            s.remaining = t0 + leg.green - c;
            return s;
        }
        if (c < t0 + leg.green + yellow) {
            SignalState s;
            s.phase = leg.phase;
            s.pending = plan[(i + 1) % 4].phase;
            s.yellow = true;
            s.remaining = t0 + leg.green + yellow - c;
            return s;
        }
        t0 += leg.green + yellow;
    }
    throw std::logic_error("fixed_time_next: clock outside cycle");
}

std::string signal_timeline_csv(
    const std::vector<std::pair<double, SignalState>>& rows) {
    std::string out = "time,phase,yellow";
    for (int i = 0; i < kNumMovements; ++i)
        out += "," + movement_name(movement_from_index(i));
    out += "\n";
    char buf[64];
    for (const auto& [t, s] : rows) {
        snprintf(buf, sizeof(buf), "%.0f,%s,%d", t, phase_name(s.phase),
                 s.yellow ? 1 : 0);
        out += buf;
        for (int i = 0; i < kNumMovements; ++i) {
            SignalColor c = signal_color(s, movement_from_index(i));
            out += c == SignalColor::Green ? ",g" : c == SignalColor::Yellow ? ",y" : ",r";
        }
        out += "\n";
    }
    return out;
}

}  // namespace intersim
