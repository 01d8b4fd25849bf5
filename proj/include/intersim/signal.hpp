#pragma once

#include <string>
#include <vector>

#include "intersim/types.hpp"

namespace intersim {

// The four protected phases: NS through+right, NS left, EW through+right,
// EW left.
enum class Phase : int { NSA = 0, NSLA = 1, EWA = 2, EWLA = 3 };
constexpr int kNumPhases = 4;

const char* phase_name(Phase p);

enum class SignalColor { Red, Yellow, Green };

// True when the movement belongs to the phase's green group.
bool phase_serves(Phase p, Movement m);

struct SignalTiming {
    double yellow = 4.0;      // clearance interval, seconds
    double green_unit = 10.0; // every green interval is a multiple of this
};

// Snapshot of the head state. During a clearance interval `phase` is the
// phase that just lost its green and `pending` the one about to receive it;
// otherwise the two coincide.
struct SignalState {
    Phase phase = Phase::NSA;
    Phase pending = Phase::NSA;
    bool yellow = false;
    double remaining = 0.0;  // seconds left in the current interval
};

SignalColor signal_color(const SignalState& s, Movement m);

inline bool movement_green(const SignalState& s, Movement m) {
    return signal_color(s, m) == SignalColor::Green;
}

struct SignalInterval {
    SignalState state;
    double duration = 0.0;
};

// Transition rule at a decision epoch: re-choosing the running phase extends
// its green by one unit with no clearance; choosing another phase inserts a
// yellow interval before the new green. Throws ContractViolation when called
// with time still remaining in the current interval.
std::vector<SignalInterval> advance_signal(const SignalState& s, Phase chosen,
                                           const SignalTiming& t);

// Drives SignalState through time for an agent-controlled head.
class SignalMachine {
  public:
    explicit SignalMachine(Phase initial = Phase::NSA, SignalTiming t = {});

    const SignalState& state() const { return state_; }
    bool at_decision_epoch() const;
    void choose(Phase p);
    void tick(double dt);

  private:
    SignalTiming timing_;
    SignalState state_;
    std::vector<SignalInterval> queued_;  // intervals after the current one
};

// Fixed-time 90 s plan: NSA 25, NSLA 12, EWA 25, EWLA 12, each green followed
// by a 4 s yellow. Pure function of the cycle clock.
SignalState fixed_time_next(double clock);
constexpr double kFixedCycle = 90.0;

// Reward for the adaptive controller: decrease in accumulated total waiting
// time between two consecutive decision epochs. Positive when waiting fell.
inline double compute_reward(double prev_atwt, double curr_atwt) {
    return prev_atwt - curr_atwt;
}

// CSV dump of a recorded signal timeline: time, phase, one colour column per
// movement.
std::string signal_timeline_csv(
    const std::vector<std::pair<double, SignalState>>& rows);

}  // namespace intersim
