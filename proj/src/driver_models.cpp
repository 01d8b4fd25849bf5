#include "intersim/driver_models.hpp"

#include <algorithm>
#include <cmath>

namespace intersim {

const char* cacc_mode_name(CaccMode m) {
    switch (m) {
        case CaccMode::SpeedControl: return "speed_control";
        case CaccMode::GapControl: return "gap_control";
        case CaccMode::GapClosing: return "gap_closing";
        case CaccMode::CollisionAvoidance: return "collision_avoidance";
    }
    return "?";
}

double krauss_safe_speed(double v_leader, double v_follower, double gap,
                         const KraussParams& p) {
    double tau = p.reaction_time;
    double denom = (v_leader + v_follower) / (2.0 * p.max_decel) + tau;
    return v_leader + (gap - v_leader * tau) / denom;
}

namespace {

// Distance covered by the braking sequence v, v-b*dt, v-2*b*dt, ... down to 0,
// the chosen speed applying already on the current step.
double braking_distance(double v, double beta, double dt) {
    if (v <= 0.0) return 0.0;
    double n = std::floor(v / beta);  // number of further braking steps
    return dt * ((n + 1.0) * v - beta * n * (n + 1.0) / 2.0);
}

}  // namespace

double braking_limited_speed(double gap, double v_leader, double decel, double dt) {
    double beta = decel * dt;
    // Worst case the leader brakes maximally starting this step.
    double reachable = gap + braking_distance(std::max(0.0, v_leader - beta), beta, dt);
    if (reachable <= 0.0) return 0.0;
    // Invert braking_distance: within the branch n = floor(v / beta) the
    // distance is dt*((n+1) v - beta n(n+1)/2), increasing in v.
    for (int n = 0;; ++n) {
        double v = reachable / (dt * (n + 1)) + beta * n / 2.0;
        if (v < beta * (n + 1) || n > 4000) return std::max(0.0, v);
    }
}

double headway_limited_speed(double gap, double v_leader, double v_self,
                             double time_gap, double min_gap, double decel,
                             double dt) {
    double beta = decel * dt;
    auto feasible = [&](double v0) {
        double pos_gap = gap;
        double v = v0;
        for (int m = 0; m < 4000; ++m) {
            if (v <= v_leader || v <= 0.0) return true;  // not closing any more
            pos_gap += (v_leader - v) * dt;
            if (pos_gap < min_gap + time_gap * v - 1e-12) return false;
            v = std::max(0.0, v - beta);
        }
        return true;
    };
    double hi = std::max({v_self, v_leader, 0.0}) + 40.0;
    if (feasible(hi)) return hi;
    double lo = 0.0;
    if (!feasible(lo)) {
        // Buffer already broken; all that is left is braking feasibility.
        return braking_limited_speed(gap - min_gap, v_leader, decel, dt);
    }
    for (int it = 0; it < 50; ++it) {
        double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

double krauss_desired_speed(const FollowInput& in, const KraussParams& p) {
    double v_des = std::min(p.v_max, in.v_self + p.max_accel * in.dt);
    if (in.v_leader) {
        double g = in.gap - p.min_gap;
        double v_safe = krauss_safe_speed(*in.v_leader, in.v_self, g, p);
        double v_brake = braking_limited_speed(g, *in.v_leader, p.max_decel, in.dt);
        v_des = std::min({v_des, v_safe, v_brake});
    }
    return std::max(0.0, v_des);
}

double krauss_apply_dawdle(double v_des, const KraussParams& p,
                           std::mt19937_64& rng, double dt) {
    double eps = p.sigma * p.max_accel * dt;
    if (eps <= 0.0) return std::max(0.0, v_des);
    std::uniform_real_distribution<double> dist(v_des - eps, v_des);
    return std::max(0.0, dist(rng));
}

double krauss_next_speed(const FollowInput& in, const KraussParams& p,
                         std::mt19937_64& rng) {
    return krauss_apply_dawdle(krauss_desired_speed(in, p), p, rng, in.dt);
}

CaccMode cacc_select_mode(const FollowInput& in, const CaccParams& p,
                          CaccMode /*prev*/) {
    if (!in.v_leader) return CaccMode::SpeedControl;
    double time_gap = in.gap / std::max(in.v_self, 0.1);
    if (time_gap > p.speed_mode_time_gap) return CaccMode::SpeedControl;
    double e = in.gap - p.min_gap - p.desired_time_gap * in.v_self;
    if (std::abs(e) < p.gap_tolerance &&
        std::abs(*in.v_leader - in.v_self) < p.speed_tolerance)
        return CaccMode::GapControl;
    if (e < -p.ca_trigger) return CaccMode::CollisionAvoidance;
    return CaccMode::GapClosing;
}

double cacc_next_speed(const FollowInput& in, const CaccParams& p, CaccMode mode) {
    double v = in.v_self;
    double v_next;
    if (mode == CaccMode::SpeedControl) {
        double a = p.speed_gain * (p.desired_speed - v);
        v_next = v + a * in.dt;
    } else {
        CaccGains g = mode == CaccMode::GapControl      ? p.gap_control
                      : mode == CaccMode::GapClosing    ? p.gap_closing
                                                        : p.collision_avoidance;
        double v_leader = in.v_leader.value_or(v);
        double e = in.gap - p.min_gap - p.desired_time_gap * v;
        double e_dot = v_leader - v - p.desired_time_gap * in.a_self;
        v_next = v + (g.k_gap * e + g.k_rel * e_dot) * in.dt;
    }
    v_next = std::clamp(v_next, v - p.max_decel * in.dt, v + p.max_accel * in.dt);
    return std::clamp(v_next, 0.0, p.v_max);
}

}  // namespace intersim
