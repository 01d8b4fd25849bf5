#pragma once

#include <optional>
#include <random>

namespace intersim {

struct KraussParams {
    double reaction_time = 1.0;   // seconds, equals the update step
    double max_accel = 2.6;       // m/s^2
    double max_decel = 4.5;       // m/s^2, b in the safe-speed term
    double v_max = 13.89;         // m/s
    double sigma = 0.5;           // dawdling factor in [0,1]
    double min_gap = 1.5;         // standstill spacing, metres
    double time_headway = 1.0;    // seconds
};

struct CaccGains {
    double k_gap;    // gain on the spacing error, 1/s
    double k_rel;    // gain on the speed error, dimensionless
};

struct CaccParams {
    double speed_gain = 0.4;            // k4, 1/s, speed-control mode
    CaccGains gap_control{0.45, 0.0125};
    CaccGains gap_closing{0.005, 0.05};
    CaccGains collision_avoidance{0.45, 0.05};
    double desired_time_gap = 0.5;      // seconds
    double min_gap = 0.5;               // metres
    double desired_speed = 13.89;       // m/s
    // Mode-selection thresholds.
    double speed_mode_time_gap = 2.0;   // seconds; beyond this the leader is ignored
    double gap_tolerance = 0.2;         // metres, gap-control band
    double speed_tolerance = 0.1;       // m/s, gap-control band
    double ca_trigger = 0.5;            // metres; spacing error below -ca_trigger
    // Physical limits shared with the rest of the fleet model.
    double max_accel = 2.6;
    double max_decel = 4.5;
    double v_max = 13.89;
};

// One car-following query. `v_leader`/`gap` describe the effective leader if
// any; `gap` is net bumper-to-bumper distance. `a_self` is the acceleration
// realised on the previous step (the CACC speed-error term differentiates
// through it).
struct FollowInput {
    double v_self = 0.0;
    std::optional<double> v_leader;
    double gap = 0.0;
    double a_self = 0.0;
    double dt = 1.0;
};

enum class CaccMode { SpeedControl, GapControl, GapClosing, CollisionAvoidance };

const char* cacc_mode_name(CaccMode m);

// Linearised safe speed: v_l + (g - v_l*t_r) / ((v_l + v_f)/(2b) + t_r).
// Callers pass the gap they want consumed; no minimum-gap handling here.
double krauss_safe_speed(double v_leader, double v_follower, double gap,
                         const KraussParams& p);

// Largest speed that can still come to a full stop behind the leader when
// both parties brake at `decel` from this step on, under the discrete
// kinematics x += v*dt. This is the exact (non-linearised) bound; it acts as
// an emergency envelope below which the linearised form may overshoot.
double braking_limited_speed(double gap, double v_leader, double decel, double dt);

// Largest speed that never closes on a leader through the buffer
// min_gap + time_gap * v: along a maximal-braking trajectory with the leader
// held at its current speed, the buffer may only be consumed while the
// follower is still faster. A follower already inside the buffer at matched
// speed is not forced to brake; it merely may not close further. Falls back
// to pure braking feasibility when even that cannot be met.
double headway_limited_speed(double gap, double v_leader, double v_self,
                             double time_gap, double min_gap, double decel,
                             double dt);

// Deterministic part of the Krauss update: min(v_max, v + a*dt, safe speed).
// The safe speed consumes gap - min_gap so vehicles come to rest one min_gap
// short of the obstacle; the emergency envelope is applied on top.
double krauss_desired_speed(const FollowInput& in, const KraussParams& p);

// Stochastic dawdle: v = max(0, uniform(v_des - sigma*a*dt, v_des)).
double krauss_apply_dawdle(double v_des, const KraussParams& p,
                           std::mt19937_64& rng, double dt);

// Full Krauss step for one vehicle.
double krauss_next_speed(const FollowInput& in, const KraussParams& p,
                         std::mt19937_64& rng);

CaccMode cacc_select_mode(const FollowInput& in, const CaccParams& p,
                          CaccMode prev);

// One CACC step in the given mode. Output is clamped to [0, v_max] and to
// the per-step acceleration bounds.
double cacc_next_speed(const FollowInput& in, const CaccParams& p, CaccMode mode);

}  // namespace intersim
