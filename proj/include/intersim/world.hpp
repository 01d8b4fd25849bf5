#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "intersim/driver_models.hpp"
#include "intersim/geometry.hpp"
#include "intersim/signal.hpp"
#include "intersim/types.hpp"

namespace intersim {

struct WorldConfig {
    double approach_length = 750.0;   // metres of approach per leg
    int lanes_per_approach = 4;
    double speed_limit = 13.89;       // m/s
    double dt = 1.0;                  // seconds per step
    double duration = 5400.0;         // episode length, seconds
    double expected_vehicles = 1200.0;
    double cav_penetration = 0.0;     // probability a spawned vehicle is a CAV
    std::uint64_t seed = 1;
    double vehicle_length = 5.0;
    PathLengths box;
    KraussParams krauss;
    CaccParams cacc;
    // Cell boundaries of the state encoding, metres from the stop line.
    std::vector<double> dtse_boundaries = {7, 14, 21, 28, 40, 60, 100, 160, 400, 750};

    void validate() const;  // throws ConfigError with the offending key
};

struct ArrivalEvent {
    double time = 0.0;
    Approach from = Approach::North;
    Approach to = Approach::South;
    VehicleKind kind = VehicleKind::Hdv;
};

// Pre-sampled arrival list: every second each of the 12 ordered od pairs
// spawns independently with p = expected_vehicles / (duration * 12).
std::vector<ArrivalEvent> generate_arrivals(const WorldConfig& cfg);

struct Vehicle {
    int id = -1;
    VehicleKind kind = VehicleKind::Hdv;
    Movement movement{Approach::North, Turn::Straight};
    int lane = 0;          // entry lane, 0 = leftmost
    double pos = 0.0;      // metres to the stop line, negative inside the box
    double speed = 0.0;
    double accel = 0.0;    // realised on the previous step
    double wait = 0.0;     // accumulated waiting time, seconds
    double spawn_time = 0.0;

    bool in_box() const { return pos < 0.0; }
};

// One four-way intersection. Approaching vehicles live in per-lane queues
// ordered front (nearest stop line) to back; once across the stop line they
// move to a per-entry-lane box queue until their movement path is complete.
class World {
  public:
    explicit World(const WorldConfig& cfg);

    // Advance one step under the given signal indication.
    void step(const SignalState& signal);

    double time() const { return t_; }
    const WorldConfig& config() const { return cfg_; }
    const ConflictGeometry& conflicts() const { return geometry_; }

    // Sum of accumulated waiting over vehicles currently in the network.
    double accumulated_total_waiting() const;

    int vehicles_spawned() const { return spawned_; }
    int vehicles_completed() const { return completed_; }
    int vehicles_in_network() const;
    double total_delay() const { return total_delay_; }        // includes departed
    double total_travel_time() const { return travel_time_sum_; }
    double mean_travel_time() const;

    static constexpr int kLanes = kNumApproaches * kLanesPerApproach;
    static int lane_id(Approach a, int lane) {
        return static_cast<int>(a) * kLanesPerApproach + lane;
    }
    const std::vector<Vehicle>& approach_lane(int lane_id) const { return lanes_[lane_id]; }
    const std::vector<Vehicle>& box_lane(int lane_id) const { return box_[lane_id]; }

    void for_each_vehicle(const std::function<void(const Vehicle&)>& fn) const;

    // Debug dump, one vehicle per line.
    std::string snapshot() const;

  private:
    void insert_arrivals();
    bool try_insert(const ArrivalEvent& ev);
    double desired_speed_hdv(const Vehicle& v,
                             const std::vector<std::pair<double, double>>& constraints) const;
    double desired_speed_cav(const Vehicle& v,
                             const std::vector<std::pair<double, double>>& constraints) const;
    void check_no_overlap(const std::vector<Vehicle>& q, const char* where) const;

    WorldConfig cfg_;
    ConflictGeometry geometry_;
    double t_ = 0.0;
    int next_id_ = 0;
    int spawned_ = 0;
    int completed_ = 0;
    double total_delay_ = 0.0;
    double travel_time_sum_ = 0.0;

    std::deque<ArrivalEvent> pending_;
    std::array<std::vector<Vehicle>, kLanes> lanes_;
    std::array<std::vector<Vehicle>, kLanes> box_;

    std::mt19937_64 noise_rng_;
    std::mt19937_64 lane_rng_;
};

}  // namespace intersim
