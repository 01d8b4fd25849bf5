#pragma once

#include <map>
#include <optional>
#include <vector>

#include "intersim/world.hpp"

namespace intersim {

struct SsmThresholds {
    double hdv_ttc = 1.5;          // seconds
    double cav_ttc = 0.5;
    double close_after = 3.0;      // seconds out of conflict before an event ends
    double crossing_radius = 100.0;  // both parties must be this close to the area

    double of(VehicleKind k) const {
        return k == VehicleKind::Cav ? cav_ttc : hdv_ttc;
    }
};

enum class ConflictKind { RearEnd, Crossing };

inline const char* conflict_kind_name(ConflictKind k) {
    return k == ConflictKind::RearEnd ? "rear_end" : "crossing";
}

// Rear-end time to collision in a shared lane. Positions grow downstream
// (leader ahead of follower); defined only while the follower is faster.
std::optional<double> ttc_rear_end(double x_leader, double v_leader,
                                   double leader_length, double x_follower,
                                   double v_follower);

// Two paths meeting in a shared conflict area. dist_* are metres to the
// area's entry along each path (negative once inside), shared_length the
// area extent, length_a the first vehicle's physical length.
struct CrossingSituation {
    double dist_a = 0.0;
    double v_a = 0.0;
    double length_a = 5.0;
    double dist_b = 0.0;
    double v_b = 0.0;
    double shared_length = 0.0;
};

// TTC of the later-arriving vehicle (B): its time to reach the area, defined
// only when A is projected to enter first and still occupy the area at B's
// arrival and B is actually moving (v_b >= 0.1).
std::optional<double> ttc_crossing(const CrossingSituation& s);

// One finished conflict episode of a vehicle pair.
struct ConflictEvent {
    ConflictKind kind = ConflictKind::RearEnd;
    int vehicle_a = -1;  // rear-end: leader; crossing: first-arriving
    VehicleKind class_a = VehicleKind::Hdv;
    int vehicle_b = -1;  // the responding vehicle whose threshold applied
    VehicleKind class_b = VehicleKind::Hdv;
    double t_begin = 0.0;
    double t_end = 0.0;
    double min_ttc = 0.0;
    double threshold = 0.0;
};

// Scans the world each step for sub-threshold TTCs and aggregates contiguous
// exposures of a vehicle pair into events. An event closes after the pair has
// been out of conflict for `close_after` seconds or either vehicle leaves.
class ConflictTracker {
  public:
    ConflictTracker(SsmThresholds thresholds, double vehicle_length);

    void observe(const World& w);
    void finalize();  // close everything still open (episode end)

    const std::vector<ConflictEvent>& events() const { return done_; }
    int count(ConflictKind k) const;

  private:
    struct Open {
        ConflictEvent ev;
        double last_seen = 0.0;
    };

    void hit(int id_a, VehicleKind ka, int id_b, VehicleKind kb,
             ConflictKind kind, double ttc, double threshold, double now);

    SsmThresholds thr_;
    double veh_len_;
    std::map<std::tuple<int, int, int>, Open> open_;  // (min id, max id, kind)
    std::vector<ConflictEvent> done_;
};

}  // namespace intersim
