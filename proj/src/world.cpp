#include "intersim/world.hpp"

#include <algorithm>
#include <cmath>

#include "intersim/rng.hpp"

namespace intersim {

namespace {
constexpr double kStopped = 0.1;        // m/s, waiting threshold
constexpr double kMinInsertSpeed = 2.0; // m/s, otherwise the arrival waits
}  // namespace

void WorldConfig::validate() const {
    if (dt <= 0.0) throw ConfigError("world.dt must be positive");
    if (duration <= 0.0) throw ConfigError("world.duration must be positive");
    if (approach_length <= 0.0) throw ConfigError("world.approach_length must be positive");
    if (expected_vehicles < 0.0) throw ConfigError("world.expected_vehicles must be >= 0");
    if (cav_penetration < 0.0 || cav_penetration > 1.0)
        throw ConfigError("world.cav_penetration must lie in [0,1]");
    if (lanes_per_approach != kLanesPerApproach)
        throw ConfigError("world.lanes_per_approach: only 4 is supported");
    if (vehicle_length <= 0.0) throw ConfigError("world.vehicle_length must be positive");
    if (speed_limit <= 0.0) throw ConfigError("world.speed_limit must be positive");
    if (box.straight <= 0.0 || box.left <= 0.0 || box.right <= 0.0)
        throw ConfigError("world.box path lengths must be positive");
    if (dtse_boundaries.size() != 10)
        throw ConfigError("world.dtse_boundaries: exactly 10 cells per lane group");
    double prev = 0.0;
    for (double b : dtse_boundaries) {
        if (b <= prev) throw ConfigError("world.dtse_boundaries must increase strictly");
        prev = b;
    }
    if (dtse_boundaries.back() != approach_length)
        throw ConfigError("world.dtse_boundaries: last boundary must equal approach_length");
}

std::vector<ArrivalEvent> generate_arrivals(const WorldConfig& cfg) {
    std::mt19937_64 rng = make_rng(cfg.seed, 0x41525256ULL);  // arrivals stream
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double p = cfg.expected_vehicles / (cfg.duration * 12.0);

    std::vector<ArrivalEvent> out;
    int seconds = static_cast<int>(std::floor(cfg.duration));
    for (int t = 0; t < seconds; ++t) {
        for (int from = 0; from < kNumApproaches; ++from) {
            for (int to = 0; to < kNumApproaches; ++to) {
                if (from == to) continue;
                if (u(rng) >= p) continue;
                ArrivalEvent ev;
                ev.time = t;
                ev.from = static_cast<Approach>(from);
                ev.to = static_cast<Approach>(to);
                ev.kind = u(rng) < cfg.cav_penetration ? VehicleKind::Cav
                                                       : VehicleKind::Hdv;
                out.push_back(ev);
            }
        }
    }
    return out;
}

World::World(const WorldConfig& cfg)
    : cfg_(cfg),
      geometry_(ConflictGeometry::build(cfg.box)),
      noise_rng_(make_rng(cfg.seed, 0x4e4f4953ULL)),
      lane_rng_(make_rng(cfg.seed, 0x4c414e45ULL)) {
    cfg_.validate();
    auto arrivals = generate_arrivals(cfg_);
    pending_.assign(arrivals.begin(), arrivals.end());
}

bool World::try_insert(const ArrivalEvent& ev) {
    Turn turn = turn_between(ev.from, ev.to);
    auto lanes = lanes_for_turn(turn);
    int lane = lanes.size() == 1
                   ? lanes[0]
                   : lanes[std::uniform_int_distribution<int>(
                         0, int(lanes.size()) - 1)(lane_rng_)];
    auto& q = lanes_[lane_id(ev.from, lane)];

    double v0 = cfg_.speed_limit;
    if (!q.empty()) {
        const Vehicle& rear = q.back();
        double gap = cfg_.approach_length - rear.pos - cfg_.vehicle_length;
        double min_gap = ev.kind == VehicleKind::Cav ? cfg_.cacc.min_gap
                                                     : cfg_.krauss.min_gap;
        double cap = braking_limited_speed(gap - min_gap, rear.speed,
                                           cfg_.krauss.max_decel, cfg_.dt);
        v0 = std::min(v0, cap);
        if (v0 < kMinInsertSpeed) return false;  // retry next step
    }

    Vehicle v;
    v.id = next_id_++;
    v.kind = ev.kind;
    v.movement = Movement{ev.from, turn};
    v.lane = lane;
    v.pos = cfg_.approach_length;
    v.speed = v0;
    v.accel = 0.0;
    v.wait = 0.0;
    v.spawn_time = t_;
    q.push_back(v);
    ++spawned_;
    return true;
}

void World::insert_arrivals() {
    // Arrivals are time-ordered; blocked ones stay at the head and retry.
    std::deque<ArrivalEvent> deferred;
    while (!pending_.empty() && pending_.front().time <= t_ + 1e-9) {
        ArrivalEvent ev = pending_.front();
        pending_.pop_front();
        if (!try_insert(ev)) {
            ev.time = t_ + cfg_.dt;  // retry on the next step
            deferred.push_back(ev);
        }
    }
    for (auto it = deferred.rbegin(); it != deferred.rend(); ++it)
        pending_.push_front(*it);
}

double World::desired_speed_hdv(
    const Vehicle& v, const std::vector<std::pair<double, double>>& constraints) const {
    FollowInput in;
    in.v_self = v.speed;
    in.a_self = v.accel;
    in.dt = cfg_.dt;
    double v_des = krauss_desired_speed(in, cfg_.krauss);  // free flow
    for (auto [v_l, gap] : constraints) {
        in.v_leader = v_l;
        in.gap = gap;
        v_des = std::min(v_des, krauss_desired_speed(in, cfg_.krauss));
    }
    return v_des;
}

double World::desired_speed_cav(
    const Vehicle& v, const std::vector<std::pair<double, double>>& constraints) const {
    const CaccParams& p = cfg_.cacc;
    FollowInput in;
    in.v_self = v.speed;
    in.a_self = v.accel;
    in.dt = cfg_.dt;
    if (!constraints.empty()) {
        // Nearest constraint acts as the leader for the control law.
        auto lead = *std::min_element(
            constraints.begin(), constraints.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
        in.v_leader = lead.first;
        in.gap = lead.second;
    }
    CaccMode mode = cacc_select_mode(in, p, CaccMode::SpeedControl);
    double v_next = cacc_next_speed(in, p, mode);
    // Safety envelopes against every constraint; these may brake harder than
    // the nominal comfort bound.
    for (auto [v_l, gap] : constraints) {
        v_next = std::min(v_next, braking_limited_speed(gap - p.min_gap, v_l,
                                                        p.max_decel, cfg_.dt));
        v_next = std::min(v_next,
                          headway_limited_speed(gap, v_l, v.speed, p.desired_time_gap,
                                                p.min_gap, p.max_decel, cfg_.dt));
    }
    return std::max(0.0, v_next);
}

void World::check_no_overlap(const std::vector<Vehicle>& q, const char* where) const {
    for (std::size_t i = 1; i < q.size(); ++i) {
        double gap = q[i].pos - q[i - 1].pos - cfg_.vehicle_length;
        if (gap < -1e-6)
            throw InvariantViolation(
                std::string("vehicle overlap in ") + where + ": ids " +
                std::to_string(q[i - 1].id) + "/" + std::to_string(q[i].id) +
                " at t=" + std::to_string(t_));
    }
}

void World::step(const SignalState& signal) {
    insert_arrivals();

    // Pass 1: next speeds from the current (pre-update) state.
    std::array<std::vector<double>, kLanes> lane_next, box_next;

    for (int li = 0; li < kLanes; ++li) {
        auto& q = lanes_[li];
        lane_next[li].resize(q.size());
        for (std::size_t i = 0; i < q.size(); ++i) {
            const Vehicle& v = q[i];
            std::vector<std::pair<double, double>> cons;

            if (i > 0) {
                const Vehicle& lead = q[i - 1];
                cons.emplace_back(lead.speed, v.pos - lead.pos - cfg_.vehicle_length);
            } else if (!box_[li].empty()) {
                // Positions are continuous across the stop line, so the head
                // keeps following the newest box entrant of its entry lane
                // until that vehicle finishes its path. Path distance only
                // grows once trajectories curve apart, so this stays safe.
                const Vehicle& lead = box_[li].back();
                cons.emplace_back(lead.speed, v.pos - lead.pos - cfg_.vehicle_length);
            }

            SignalColor c = signal_color(signal, v.movement);
            bool hold_line = c == SignalColor::Red;
            if (c == SignalColor::Yellow) {
                // Stop only if a full brake still ends before the line.
                double after = std::max(0.0, v.speed - cfg_.krauss.max_decel * cfg_.dt);
                double need = after * cfg_.dt;
                double vv = after;
                while (vv > 0.0) {
                    vv = std::max(0.0, vv - cfg_.krauss.max_decel * cfg_.dt);
                    need += vv * cfg_.dt;
                }
                hold_line = need <= v.pos;
            }
            if (hold_line) cons.emplace_back(0.0, v.pos);

            lane_next[li][i] = v.kind == VehicleKind::Cav
                                   ? desired_speed_cav(v, cons)
                                   : desired_speed_hdv(v, cons);
            if (v.kind == VehicleKind::Hdv)
                lane_next[li][i] =
                    krauss_apply_dawdle(lane_next[li][i], cfg_.krauss, noise_rng_, cfg_.dt);
        }
    }

    for (int li = 0; li < kLanes; ++li) {
        auto& q = box_[li];
        box_next[li].resize(q.size());
        for (std::size_t i = 0; i < q.size(); ++i) {
            const Vehicle& v = q[i];
            std::vector<std::pair<double, double>> cons;
            if (i > 0) {
                const Vehicle& lead = q[i - 1];
                cons.emplace_back(lead.speed, v.pos - lead.pos - cfg_.vehicle_length);
            }
            box_next[li][i] = v.kind == VehicleKind::Cav
                                  ? desired_speed_cav(v, cons)
                                  : desired_speed_hdv(v, cons);
            if (v.kind == VehicleKind::Hdv)
                box_next[li][i] =
                    krauss_apply_dawdle(box_next[li][i], cfg_.krauss, noise_rng_, cfg_.dt);
        }
    }

    // Pass 2: apply.
    auto apply = [&](std::vector<Vehicle>& q, const std::vector<double>& vs) {
        for (std::size_t i = 0; i < q.size(); ++i) {
            Vehicle& v = q[i];
            v.accel = (vs[i] - v.speed) / cfg_.dt;
            v.speed = vs[i];
            v.pos -= v.speed * cfg_.dt;
        }
    };
    for (int li = 0; li < kLanes; ++li) apply(lanes_[li], lane_next[li]);
    for (int li = 0; li < kLanes; ++li) apply(box_[li], box_next[li]);

    t_ += cfg_.dt;

    // Stop-line crossings: move lane heads into the box queues.
    for (int li = 0; li < kLanes; ++li) {
        auto& q = lanes_[li];
        while (!q.empty() && q.front().in_box()) {
            box_[li].push_back(q.front());
            q.erase(q.begin());
        }
    }

    // Completed movements despawn.
    for (int li = 0; li < kLanes; ++li) {
        auto& q = box_[li];
        while (!q.empty() && q.front().pos <= -cfg_.box.of(q.front().movement.turn)) {
            travel_time_sum_ += t_ - q.front().spawn_time;
            ++completed_;
            q.erase(q.begin());
        }
    }

    // Waiting accumulation and overlap audit.
    for (int li = 0; li < kLanes; ++li) {
        for (Vehicle& v : lanes_[li])
            if (v.speed < kStopped) {
                v.wait += cfg_.dt;
                total_delay_ += cfg_.dt;
            }
        for (Vehicle& v : box_[li])
            if (v.speed < kStopped) {
                v.wait += cfg_.dt;
                total_delay_ += cfg_.dt;
            }
        check_no_overlap(lanes_[li], "approach lane");
        check_no_overlap(box_[li], "box path");
    }
}

double World::accumulated_total_waiting() const {
    double sum = 0.0;
    for (int li = 0; li < kLanes; ++li) {
        for (const Vehicle& v : lanes_[li]) sum += v.wait;
        for (const Vehicle& v : box_[li]) sum += v.wait;
    }
    return sum;
}

int World::vehicles_in_network() const {
    int n = 0;
    for (int li = 0; li < kLanes; ++li)
        n += int(lanes_[li].size()) + int(box_[li].size());
    return n;
}

double World::mean_travel_time() const {
    return completed_ > 0 ? travel_time_sum_ / completed_ : 0.0;
}

void World::for_each_vehicle(const std::function<void(const Vehicle&)>& fn) const {
    for (int li = 0; li < kLanes; ++li) {
        for (const Vehicle& v : lanes_[li]) fn(v);
        for (const Vehicle& v : box_[li]) fn(v);
    }
}

std::string World::snapshot() const {
    std::string out;
    char buf[160];
    for_each_vehicle([&](const Vehicle& v) {
        snprintf(buf, sizeof(buf), "%d %s %s lane%d pos=%.3f v=%.3f wait=%.0f\n",
                 v.id, kind_name(v.kind), movement_name(v.movement).c_str(),
                 v.lane, v.pos, v.speed, v.wait);
        out += buf;
    });
    return out;
}

}  // namespace intersim
