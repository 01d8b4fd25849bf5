#pragma once

#include <array>
#include <map>
#include <utility>
#include <vector>

#include "intersim/types.hpp"

namespace intersim {

// Distance budget of each movement inside the intersection box. These are the
// kinematic path lengths vehicles traverse between stop line and despawn.
struct PathLengths {
    double straight = 24.0;
    double left = 30.0;
    double right = 12.0;

    double of(Turn t) const {
        switch (t) {
            case Turn::Left: return left;
            case Turn::Straight: return straight;
            case Turn::Right: return right;
        }
        return 0.0;
    }
};

// Lane discipline on every approach: lane 0 is left-turn only, lanes 1 and 2
// are through lanes, lane 3 serves through and right-turning traffic.
constexpr int kLanesPerApproach = 4;

inline bool turn_allowed_in_lane(int lane, Turn t) {
    switch (t) {
        case Turn::Left: return lane == 0;
        case Turn::Straight: return lane >= 1 && lane <= 3;
        case Turn::Right: return lane == 3;
    }
    return false;
}

inline std::vector<int> lanes_for_turn(Turn t) {
    switch (t) {
        case Turn::Left: return {0};
        case Turn::Straight: return {1, 2, 3};
        case Turn::Right: return {3};
    }
    return {};
}

struct Vec2 {
    double x = 0.0, y = 0.0;
};

// Schematic centreline of a movement through the box, sampled at `samples`
// points. Used only to locate conflict areas; kinematics use PathLengths.
std::vector<Vec2> movement_polyline(Movement m, int samples);

// Where two movements' paths overlap. Distances are metres along each path
// from the stop line, already scaled to the configured path lengths.
struct ConflictZone {
    double entry_a = 0.0;  // first movement's entry into the shared area
    double entry_b = 0.0;  // second movement's entry
    double length = 0.0;   // extent of the shared area
};

// Map from ordered movement-index pairs to conflict zones. Only pairs whose
// paths geometrically intersect are present; entries exist in both orders.
class ConflictGeometry {
  public:
    static ConflictGeometry build(const PathLengths& lengths);

    const ConflictZone* find(Movement a, Movement b) const;
    const std::map<std::pair<int, int>, ConflictZone>& all() const { return zones_; }

  private:
    std::map<std::pair<int, int>, ConflictZone> zones_;
};

}  // namespace intersim
