#include "intersim/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace intersim {

namespace {

// The schematic box is a 24 m square (half-width 12). Each leg carries four
// 3.2 m entry lanes right of the centreline and four exit lanes mirrored on
// the other side. Representative lane offsets from the road centreline:
// left turns start on lane 0 (1.6 m), through traffic is represented by the
// middle through lane (8.0 m), right turns hug lane 3 (11.2 m).
constexpr double kHalf = 12.0;
constexpr double kProximity = 2.0;  // two paths conflict within this distance

Vec2 heading(Approach a) {
    switch (a) {
        case Approach::North: return {0.0, -1.0};
        case Approach::East: return {-1.0, 0.0};
        case Approach::South: return {0.0, 1.0};
        case Approach::West: return {1.0, 0.0};
    }
    return {0.0, 0.0};
}

Vec2 cw(Vec2 v) { return {v.y, -v.x}; }
Vec2 ccw(Vec2 v) { return {-v.y, v.x}; }
Vec2 add(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
Vec2 scale(Vec2 v, double s) { return {v.x * s, v.y * s}; }

double lane_offset(Turn t) {
    switch (t) {
        case Turn::Left: return 1.6;
        case Turn::Straight: return 8.0;
        case Turn::Right: return 11.2;
    }
    return 0.0;
}

double dist2(Vec2 a, Vec2 b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

}  // namespace

std::vector<Vec2> movement_polyline(Movement m, int samples) {
    if (samples < 2) throw std::invalid_argument("movement_polyline: samples < 2");
    Vec2 h = heading(m.from);
    double off = lane_offset(m.turn);
    Vec2 entry = add(scale(h, -kHalf), scale(cw(h), off));

    std::vector<Vec2> pts;
    pts.reserve(samples);
    if (m.turn == Turn::Straight) {
        for (int i = 0; i < samples; ++i) {
            double f = double(i) / (samples - 1);
            pts.push_back(add(entry, scale(h, f * 2.0 * kHalf)));
        }
        return pts;
    }

    // Turns are quarter arcs. A left turn (counter-clockwise) from lane
    // offset o has radius kHalf + o; the right-turn corner hook has radius
    // kHalf - o.
    bool leftturn = m.turn == Turn::Left;
    double radius = leftturn ? kHalf + off : kHalf - off;
    Vec2 centre = add(entry, scale(leftturn ? ccw(h) : cw(h), radius));
    double a0 = std::atan2(entry.y - centre.y, entry.x - centre.x);
    double sweep = leftturn ? M_PI / 2.0 : -M_PI / 2.0;
    for (int i = 0; i < samples; ++i) {
        double a = a0 + sweep * double(i) / (samples - 1);
        pts.push_back({centre.x + radius * std::cos(a), centre.y + radius * std::sin(a)});
    }
    return pts;
}

ConflictGeometry ConflictGeometry::build(const PathLengths& lengths) {
    const int kSamples = 301;
    std::array<std::vector<Vec2>, kNumMovements> polys;
    for (int i = 0; i < kNumMovements; ++i)
        polys[i] = movement_polyline(movement_from_index(i), kSamples);

    ConflictGeometry g;
    for (int ia = 0; ia < kNumMovements; ++ia) {
        for (int ib = 0; ib < kNumMovements; ++ib) {
            if (ia == ib) continue;
            Movement ma = movement_from_index(ia), mb = movement_from_index(ib);
            // Streams sharing an entry leg run parallel, streams sharing an
            // exit leg merge; neither is a crossing conflict.
            if (ma.from == mb.from) continue;
            if (exit_approach(ma) == exit_approach(mb)) continue;

            auto near_other = [&](const std::vector<Vec2>& self,
                                  const std::vector<Vec2>& other, int i) {
                for (const Vec2& q : other)
                    if (dist2(self[i], q) <= kProximity * kProximity) return true;
                return false;
            };

            int first_a = -1, last_a = -1;
            for (int i = 0; i < kSamples; ++i) {
                if (near_other(polys[ia], polys[ib], i)) {
                    if (first_a < 0) first_a = i;
                    last_a = i;
                }
            }
            if (first_a < 0) continue;
            int first_b = -1, last_b = -1;
            for (int i = 0; i < kSamples; ++i) {
                if (near_other(polys[ib], polys[ia], i)) {
                    if (first_b < 0) first_b = i;
                    last_b = i;
                }
            }

            double len_a = lengths.of(ma.turn), len_b = lengths.of(mb.turn);
            auto frac = [&](int i) { return double(i) / (kSamples - 1); };
            ConflictZone z;
            z.entry_a = frac(first_a) * len_a;
            z.entry_b = frac(first_b) * len_b;
            z.length = std::max((frac(last_a) - frac(first_a)) * len_a,
                                (frac(last_b) - frac(first_b)) * len_b);
            g.zones_[{ia, ib}] = z;
        }
    }
    return g;
}

const ConflictZone* ConflictGeometry::find(Movement a, Movement b) const {
    auto it = zones_.find({movement_index(a), movement_index(b)});
    return it == zones_.end() ? nullptr : &it->second;
}

}  // namespace intersim
