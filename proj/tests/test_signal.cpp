#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "intersim/signal.hpp"
#include "intersim/types.hpp"

using namespace intersim;

TEST_SUITE_BEGIN("signal");

namespace {

Movement mv(Approach a, Turn t) { return Movement{a, t}; }

bool same_state(const SignalState& a, const SignalState& b) {
    return a.phase == b.phase && a.pending == b.pending && a.yellow == b.yellow &&
           std::abs(a.remaining - b.remaining) < 1e-9;
}

}  // namespace

TEST_CASE("fixed plan walks NSA 25, NSLA 12, EWA 25, EWLA 12 with 4 s yellows") {
    struct Probe {
        double clock;
        Phase phase;
        bool yellow;
        Phase pending;
        double remaining;
    };
    const Probe probes[] = {
        {0.0, Phase::NSA, false, Phase::NSA, 25.0},
        {10.0, Phase::NSA, false, Phase::NSA, 15.0},
        {24.9, Phase::NSA, false, Phase::NSA, 0.1},
        {25.0, Phase::NSA, true, Phase::NSLA, 4.0},
        {27.0, Phase::NSA, true, Phase::NSLA, 2.0},
        {29.0, Phase::NSLA, false, Phase::NSLA, 12.0},
        {41.0, Phase::NSLA, true, Phase::EWA, 4.0},
        {45.0, Phase::EWA, false, Phase::EWA, 25.0},
        {70.0, Phase::EWA, true, Phase::EWLA, 4.0},
        {74.0, Phase::EWLA, false, Phase::EWLA, 12.0},
        {86.0, Phase::EWLA, true, Phase::NSA, 4.0},
        {89.5, Phase::EWLA, true, Phase::NSA, 0.5},
    };
    for (const auto& p : probes) {
        CAPTURE(p.clock);
        SignalState s = fixed_time_next(p.clock);
        CHECK(s.phase == p.phase);
        CHECK(s.yellow == p.yellow);
        CHECK(s.pending == p.pending);
        CHECK(s.remaining == doctest::Approx(p.remaining));
    }
}

TEST_CASE("fixed plan is 90 s periodic and handles negative clocks") {
    for (double c = 0.0; c < 90.0; c += 0.5) {
        CAPTURE(c);
        SignalState a = fixed_time_next(c);
        CHECK(same_state(a, fixed_time_next(c + 90.0)));
        CHECK(same_state(a, fixed_time_next(c + 9.0 * 90.0)));
        CHECK(same_state(a, fixed_time_next(c - 90.0)));
    }
    CHECK(same_state(fixed_time_next(-1.0), fixed_time_next(89.0)));
}

TEST_CASE("colours follow the active phase and clearance interval") {
    SignalState green;
    green.phase = Phase::NSA;
    green.pending = Phase::NSA;
    green.yellow = false;

    CHECK(signal_color(green, mv(Approach::North, Turn::Straight)) ==
          SignalColor::Green);
    CHECK(signal_color(green, mv(Approach::South, Turn::Right)) ==
          SignalColor::Green);
    CHECK(signal_color(green, mv(Approach::North, Turn::Left)) == SignalColor::Red);
    CHECK(signal_color(green, mv(Approach::East, Turn::Straight)) ==
          SignalColor::Red);
    CHECK(movement_green(green, mv(Approach::South, Turn::Straight)));

    SignalState clear = green;
    clear.yellow = true;
    clear.pending = Phase::EWA;
    // the losing phase shows yellow; everyone else stays red, including the
    // phase about to receive its green
    CHECK(signal_color(clear, mv(Approach::North, Turn::Straight)) ==
          SignalColor::Yellow);
    CHECK(signal_color(clear, mv(Approach::East, Turn::Straight)) ==
          SignalColor::Red);
    CHECK(signal_color(clear, mv(Approach::North, Turn::Left)) == SignalColor::Red);
}

TEST_CASE("re-choosing the running phase extends green with no clearance") {
    SignalState s;
    s.phase = Phase::EWA;
    s.pending = Phase::EWA;
    s.yellow = false;
    s.remaining = 0.0;

    auto plan = advance_signal(s, Phase::EWA, SignalTiming{});
    REQUIRE(plan.size() == 1);
    CHECK(plan[0].state.phase == Phase::EWA);
    CHECK(!plan[0].state.yellow);
    CHECK(plan[0].duration == doctest::Approx(10.0));
}

TEST_CASE("switching phases inserts a yellow before the new green") {
    SignalState s;
    s.phase = Phase::NSA;
    s.pending = Phase::NSA;
    s.yellow = false;
    s.remaining = 0.0;

    auto plan = advance_signal(s, Phase::NSLA, SignalTiming{});
    REQUIRE(plan.size() == 2);
    CHECK(plan[0].state.yellow);
    CHECK(plan[0].state.phase == Phase::NSA);
    CHECK(plan[0].state.pending == Phase::NSLA);
    CHECK(plan[0].duration == doctest::Approx(4.0));
    CHECK(!plan[1].state.yellow);
    CHECK(plan[1].state.phase == Phase::NSLA);
    CHECK(plan[1].duration == doctest::Approx(10.0));
}

TEST_CASE("advancing outside a decision epoch is a contract violation") {
    SignalState midGreen;
    midGreen.remaining = 3.0;
    CHECK_THROWS_AS(advance_signal(midGreen, Phase::NSA, SignalTiming{}),
                    ContractViolation);

    SignalState inYellow;
    inYellow.yellow = true;
    inYellow.remaining = 2.0;
    CHECK_THROWS_AS(advance_signal(inYellow, Phase::EWA, SignalTiming{}),
                    ContractViolation);
}

TEST_CASE("machine reaches an epoch after 10 s, or 14 when switching") {
    SignalMachine m(Phase::NSA);
    CHECK(!m.at_decision_epoch());
    for (int i = 0; i < 10; ++i) {
        CHECK(!m.at_decision_epoch());
        m.tick(1.0);
    }
    CHECK(m.at_decision_epoch());

    m.choose(Phase::NSA);  // extend
    for (int i = 0; i < 10; ++i) {
        CHECK(!m.at_decision_epoch());
        CHECK(!m.state().yellow);
        m.tick(1.0);
    }
    CHECK(m.at_decision_epoch());

    m.choose(Phase::EWA);  // switch: 4 yellow + 10 green
    for (int i = 0; i < 4; ++i) {
        CHECK(m.state().yellow);
        CHECK(m.state().phase == Phase::NSA);
        CHECK(m.state().pending == Phase::EWA);
        m.tick(1.0);
    }
    for (int i = 0; i < 10; ++i) {
        CHECK(!m.at_decision_epoch());
        CHECK(!m.state().yellow);
        CHECK(m.state().phase == Phase::EWA);
        m.tick(1.0);
    }
    CHECK(m.at_decision_epoch());
}

TEST_CASE("machine enforces the epoch contract in both directions") {
    SignalMachine m(Phase::NSLA);
    CHECK_THROWS_AS(m.choose(Phase::NSLA), ContractViolation);  // mid-green
    for (int i = 0; i < 10; ++i) m.tick(1.0);
    CHECK_THROWS_AS(m.tick(1.0), ContractViolation);  // unresolved epoch
    m.choose(Phase::EWLA);
    CHECK_THROWS_AS(m.choose(Phase::EWLA), ContractViolation);  // mid-yellow
}

TEST_CASE("fractional ticks carry across interval boundaries") {
    SignalMachine m(Phase::NSA);
    for (int i = 0; i < 20; ++i) m.tick(0.5);
    CHECK(m.at_decision_epoch());
    m.choose(Phase::EWLA);
    // 3 s into the 4 s yellow, then a 2.5 s tick lands 1.5 s into the green
    m.tick(3.0);
    CHECK(m.state().yellow);
    m.tick(2.5);
    CHECK(!m.state().yellow);
    CHECK(m.state().phase == Phase::EWLA);
    CHECK(m.state().remaining == doctest::Approx(8.5));
}

TEST_CASE("machine timeline matches hand bookkeeping for a choice script") {
    // Interval list derived by hand from the transition rule: same choice
    // appends green 10, different appends yellow 4 then green 10.
    const Phase script[] = {Phase::NSA,  Phase::EWA, Phase::EWA,
                            Phase::NSLA, Phase::EWLA, Phase::NSA};
    struct Span {
        Phase phase;
        bool yellow;
        double dur;
    };
    std::vector<Span> spans;
    spans.push_back({Phase::NSA, false, 10.0});  // initial green
    Phase running = Phase::NSA;
    for (Phase p : script) {
        if (p != running) {
            spans.push_back({running, true, 4.0});
            running = p;
        }
        spans.push_back({running, false, 10.0});
    }

    SignalMachine m(Phase::NSA);
    std::size_t idx = 0;
    double into = 0.0;
    std::size_t next_choice = 0;
    double total = 0.0;
    for (const Span& s : spans) total += s.dur;
    for (double t = 0.0; t + 0.5 < total; t += 1.0) {
        if (m.at_decision_epoch()) {
            REQUIRE(next_choice < std::size(script));
            m.choose(script[next_choice++]);
        }
        CAPTURE(t);
        CHECK(m.state().phase == spans[idx].phase);
        CHECK(m.state().yellow == spans[idx].yellow);
        m.tick(1.0);
        into += 1.0;
        if (into >= spans[idx].dur - 1e-9) {
            into = 0.0;
            ++idx;
        }
    }
    CHECK(next_choice == std::size(script));
    CHECK(m.at_decision_epoch());
}

TEST_CASE("reward is the drop in accumulated waiting time") {
    CHECK(compute_reward(40.0, 25.0) == doctest::Approx(15.0));
    CHECK(compute_reward(10.0, 30.0) == doctest::Approx(-20.0));
    CHECK(compute_reward(5.0, 5.0) == doctest::Approx(0.0));
}

TEST_CASE("timeline csv lists one colour column per movement") {
    std::vector<std::pair<double, SignalState>> rows;
    SignalState s = fixed_time_next(0.0);
    rows.push_back({0.0, s});
    std::string csv = signal_timeline_csv(rows);
    auto nl = csv.find('\n');
    REQUIRE(nl != std::string::npos);
    std::string header = csv.substr(0, nl);
    CHECK(header.substr(0, 17) == "time,phase,yellow");
    int commas = 0;
    for (char c : header) commas += (c == ',');
    CHECK(commas == 2 + kNumMovements);
    // NSA green: N/S straight+right green, everything else red
    std::string body = csv.substr(nl + 1);
    CHECK(body.find("0,NSA,0") == 0);
    int greens = 0;
    for (char c : body) greens += (c == 'g');
    CHECK(greens == 4);
}

TEST_SUITE_END();
