#include "intersim/ssm.hpp"

#include <algorithm>
#include <unordered_set>

namespace intersim {

namespace {
constexpr double kMoving = 0.1;  // m/s; below this a vehicle has no TTC
constexpr double kInf = 1e18;
}  // namespace

std::optional<double> ttc_rear_end(double x_leader, double v_leader,
                                   double leader_length, double x_follower,
                                   double v_follower) {
    if (v_follower <= v_leader) return std::nullopt;
    double gap = (x_leader - x_follower) - leader_length;
    return gap / (v_follower - v_leader);
}

std::optional<double> ttc_crossing(const CrossingSituation& s) {
    if (s.v_b < kMoving) return std::nullopt;
    if (s.dist_b <= 0.0) return std::nullopt;  // B already inside the area
    double t_entry_b = s.dist_b / s.v_b;

    double t_entry_a, t_exit_a;
    if (s.dist_a <= 0.0) {
        if (s.dist_a + s.shared_length + s.length_a <= 0.0)
            return std::nullopt;  // A's tail already cleared the area
        t_entry_a = 0.0;
        t_exit_a = s.v_a < kMoving ? kInf
                                   : (s.dist_a + s.shared_length + s.length_a) / s.v_a;
    } else if (s.v_a < kMoving) {
        t_entry_a = kInf;  // stopped short of the area: never enters
        t_exit_a = kInf;
    } else {
        t_entry_a = s.dist_a / s.v_a;
        t_exit_a = (s.dist_a + s.shared_length + s.length_a) / s.v_a;
    }

    if (!(t_entry_a < t_entry_b)) return std::nullopt;  // A must arrive first
    if (!(t_exit_a > t_entry_b)) return std::nullopt;   // and still occupy it
    return t_entry_b;
}

ConflictTracker::ConflictTracker(SsmThresholds thresholds, double vehicle_length)
    : thr_(thresholds), veh_len_(vehicle_length) {}

void ConflictTracker::hit(int id_a, VehicleKind ka, int id_b, VehicleKind kb,
                          ConflictKind kind, double ttc, double threshold,
                          double now) {
    std::tuple<int, int, int> key{std::min(id_a, id_b), std::max(id_a, id_b),
                                  int(kind)};
    auto it = open_.find(key);
    if (it == open_.end()) {
        Open o;
        o.ev.kind = kind;
        o.ev.vehicle_a = id_a;
        o.ev.class_a = ka;
        o.ev.vehicle_b = id_b;
        o.ev.class_b = kb;
        o.ev.t_begin = now;
        o.ev.t_end = now;
        o.ev.min_ttc = ttc;
        o.ev.threshold = threshold;
        o.last_seen = now;
        open_.emplace(key, o);
        return;
    }
    Open& o = it->second;
    o.last_seen = now;
    o.ev.t_end = now;
    if (ttc < o.ev.min_ttc) {
        // Keep the state of the worst exposure, roles included.
        o.ev.min_ttc = ttc;
        o.ev.vehicle_a = id_a;
        o.ev.class_a = ka;
        o.ev.vehicle_b = id_b;
        o.ev.class_b = kb;
        o.ev.threshold = threshold;
    }
}

void ConflictTracker::observe(const World& w) {
    const double now = w.time();

    // --- rear-end scan: in-lane pairs, the lane head against the vehicle it
    // followed into the box, and in-box pairs --------------------------------
    auto scan_pair = [&](const Vehicle& lead, const Vehicle& follow) {
        auto ttc = ttc_rear_end(-lead.pos, lead.speed, veh_len_, -follow.pos,
                                follow.speed);
        if (!ttc) return;
        double threshold = thr_.of(follow.kind);
        if (*ttc <= threshold)
            hit(lead.id, lead.kind, follow.id, follow.kind, ConflictKind::RearEnd,
                *ttc, threshold, now);
    };

    for (int li = 0; li < World::kLanes; ++li) {
        const auto& lane = w.approach_lane(li);
        for (std::size_t i = 1; i < lane.size(); ++i)
            scan_pair(lane[i - 1], lane[i]);
        const auto& box = w.box_lane(li);
        for (std::size_t i = 1; i < box.size(); ++i)
            scan_pair(box[i - 1], box[i]);
        if (!lane.empty() && !box.empty()) scan_pair(box.back(), lane.front());
    }

    // --- crossing scan ------------------------------------------------------
    struct Near {
        const Vehicle* v;
        double to_entry;  // metres to the zone entry along own path
    };
    const auto& zones = w.conflicts().all();
    for (const auto& [key, zone] : zones) {
        auto [ia, ib] = key;
        if (ia > ib) continue;  // mirrored entry handles the other order

        std::vector<Near> as, bs;
        w.for_each_vehicle([&](const Vehicle& v) {
            int mi = movement_index(v.movement);
            if (mi != ia && mi != ib) return;
            double entry = mi == ia ? zone.entry_a : zone.entry_b;
            double to_entry = entry + v.pos;  // pos < 0 inside the box
            if (to_entry > thr_.crossing_radius) return;
            if (to_entry + zone.length + veh_len_ < 0.0) return;  // already out
            (mi == ia ? as : bs).push_back({&v, to_entry});
        });
        if (as.empty() || bs.empty()) continue;

        auto eval = [&](const Near& first, const Near& second) {
            CrossingSituation s;
            s.dist_a = first.to_entry;
            s.v_a = first.v->speed;
            s.length_a = veh_len_;
            s.dist_b = second.to_entry;
            s.v_b = second.v->speed;
            s.shared_length = zone.length;
            auto ttc = ttc_crossing(s);
            if (!ttc) return;
            double threshold = thr_.of(second.v->kind);
            if (*ttc <= threshold)
                hit(first.v->id, first.v->kind, second.v->id, second.v->kind,
                    ConflictKind::Crossing, *ttc, threshold, now);
        };
        for (const Near& a : as)
            for (const Near& b : bs) {
                eval(a, b);
                eval(b, a);
            }
    }

    // --- event closure ------------------------------------------------------
    std::unordered_set<int> present;
    w.for_each_vehicle([&](const Vehicle& v) { present.insert(v.id); });
    for (auto it = open_.begin(); it != open_.end();) {
        const Open& o = it->second;
        bool gone = !present.count(o.ev.vehicle_a) || !present.count(o.ev.vehicle_b);
        if (gone || now - o.last_seen >= thr_.close_after) {
            done_.push_back(o.ev);
            it = open_.erase(it);
        } else {
            ++it;
        }
    }
}

void ConflictTracker::finalize() {
    for (auto& [key, o] : open_) done_.push_back(o.ev);
    open_.clear();
}

int ConflictTracker::count(ConflictKind k) const {
    int n = 0;
    for (const auto& e : done_)
        if (e.kind == k) ++n;
    return n;
}

}  // namespace intersim
