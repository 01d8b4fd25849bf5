#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace intersim {

// Compass indexing is used everywhere: N=0, E=1, S=2, W=3, clockwise.
enum class Approach : int { North = 0, East = 1, South = 2, West = 3 };
enum class Turn : int { Left = 0, Straight = 1, Right = 2 };
enum class VehicleKind : int { Hdv = 0, Cav = 1 };

constexpr int kNumApproaches = 4;
constexpr int kNumTurns = 3;
constexpr int kNumMovements = kNumApproaches * kNumTurns;

// A movement is an entry approach plus a turn direction; the exit leg follows.
struct Movement {
    Approach from;
    Turn turn;

    friend bool operator==(Movement a, Movement b) {
        return a.from == b.from && a.turn == b.turn;
    }
};

constexpr int movement_index(Approach a, Turn t) {
    return static_cast<int>(a) * kNumTurns + static_cast<int>(t);
}
constexpr int movement_index(Movement m) { return movement_index(m.from, m.turn); }

constexpr Movement movement_from_index(int idx) {
    return Movement{static_cast<Approach>(idx / kNumTurns),
                    static_cast<Turn>(idx % kNumTurns)};
}

constexpr Approach opposite(Approach a) {
    return static_cast<Approach>((static_cast<int>(a) + 2) % 4);
}

// Exit approach of a movement under right-hand traffic: straight crosses to the
// opposite leg, a left turn exits one leg clockwise, a right turn one leg
// counter-clockwise (N entry heading south turns left into the east leg).
constexpr Approach exit_approach(Movement m) {
    int a = static_cast<int>(m.from);
    switch (m.turn) {
        case Turn::Straight: return static_cast<Approach>((a + 2) % 4);
        case Turn::Left: return static_cast<Approach>((a + 1) % 4);
        case Turn::Right: return static_cast<Approach>((a + 3) % 4);
    }
    return m.from;  // unreachable
}

// Turn direction implied by an origin/destination pair. U-turns are not part
// of the network and are rejected.
inline Turn turn_between(Approach from, Approach to) {
    if (from == to)
        throw std::invalid_argument("turn_between: U-turn od pair");
    int d = (static_cast<int>(to) - static_cast<int>(from) + 4) % 4;
    switch (d) {
        case 1: return Turn::Left;
        case 2: return Turn::Straight;
        case 3: return Turn::Right;
    }
    throw std::logic_error("turn_between: bad approach pair");
}

inline const char* approach_name(Approach a) {
    switch (a) {
        case Approach::North: return "N";
        case Approach::East: return "E";
        case Approach::South: return "S";
        case Approach::West: return "W";
    }
    return "?";
}

inline const char* turn_name(Turn t) {
    switch (t) {
        case Turn::Left: return "left";
        case Turn::Straight: return "straight";
        case Turn::Right: return "right";
    }
    return "?";
}

inline std::string movement_name(Movement m) {
    return std::string(approach_name(m.from)) + "_" + turn_name(m.turn);
}

inline const char* kind_name(VehicleKind k) {
    return k == VehicleKind::Hdv ? "hdv" : "cav";
}

// Thrown when a caller breaks an interface contract (e.g. advancing the
// signal outside a decision epoch).
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// Thrown when the simulation reaches a state that should be impossible
// (vehicle overlap and the like). Never caught internally.
struct InvariantViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown on invalid configuration input.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace intersim
