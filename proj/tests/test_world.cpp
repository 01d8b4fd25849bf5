#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "intersim/signal.hpp"
#include "intersim/world.hpp"

using namespace intersim;

TEST_SUITE_BEGIN("world");

namespace {

SignalState held_green(Phase p) {
    SignalState s;
    s.phase = p;
    s.pending = p;
    s.yellow = false;
    s.remaining = 1e9;
    return s;
}

// Walk every queue pair that can physically collide and check spacing,
// including a lane head against the newest box entrant of its own lane.
void check_spacing(const World& w) {
    double len = w.config().vehicle_length;
    for (int li = 0; li < World::kLanes; ++li) {
        const auto& lane = w.approach_lane(li);
        const auto& box = w.box_lane(li);
        for (std::size_t i = 1; i < lane.size(); ++i)
            REQUIRE(lane[i].pos - lane[i - 1].pos - len >= -1e-6);
        for (std::size_t i = 1; i < box.size(); ++i)
            REQUIRE(box[i].pos - box[i - 1].pos - len >= -1e-6);
        if (!lane.empty() && !box.empty())
            REQUIRE(lane.front().pos - box.back().pos - len >= -1e-6);
    }
}

}  // namespace

TEST_CASE("config validation pinpoints each offending key") {
    WorldConfig good;
    CHECK_NOTHROW(good.validate());

    auto expect_throw = [](auto mutate) {
        WorldConfig c;
        mutate(c);
        CHECK_THROWS_AS(c.validate(), ConfigError);
    };
    expect_throw([](WorldConfig& c) { c.dt = 0.0; });
    expect_throw([](WorldConfig& c) { c.dt = -1.0; });
    expect_throw([](WorldConfig& c) { c.duration = 0.0; });
    expect_throw([](WorldConfig& c) { c.approach_length = -5.0; });
    expect_throw([](WorldConfig& c) { c.expected_vehicles = -1.0; });
    expect_throw([](WorldConfig& c) { c.cav_penetration = -0.1; });
    expect_throw([](WorldConfig& c) { c.cav_penetration = 1.1; });
    expect_throw([](WorldConfig& c) { c.lanes_per_approach = 3; });
    expect_throw([](WorldConfig& c) { c.vehicle_length = 0.0; });
    expect_throw([](WorldConfig& c) { c.speed_limit = 0.0; });
    expect_throw([](WorldConfig& c) { c.box.left = 0.0; });
    expect_throw([](WorldConfig& c) { c.dtse_boundaries.pop_back(); });
    expect_throw([](WorldConfig& c) { c.dtse_boundaries[3] = c.dtse_boundaries[2]; });
    expect_throw([](WorldConfig& c) { c.dtse_boundaries.back() = 600.0; });
    // shorter approach is fine when the cell grid shrinks with it
    WorldConfig shorter;
    shorter.approach_length = 200.0;
    shorter.dtse_boundaries = {7, 14, 21, 28, 40, 60, 100, 130, 160, 200};
    CHECK_NOTHROW(shorter.validate());
}

TEST_CASE("arrival sampling is seeded, time ordered and od balanced") {
    WorldConfig cfg;  // 5400 s, 1200 expected
    std::vector<std::size_t> counts;
    std::map<std::pair<int, int>, int> per_od;
    double total = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        cfg.seed = seed;
        auto a = generate_arrivals(cfg);
        auto again = generate_arrivals(cfg);
        REQUIRE(a.size() == again.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].time == again[i].time);
            CHECK(a[i].from == again[i].from);
            CHECK(a[i].to == again[i].to);
            CHECK(a[i].kind == again[i].kind);
        }
        double prev = 0.0;
        for (const auto& ev : a) {
            CHECK(ev.time >= prev);
            prev = ev.time;
            CHECK(ev.time == std::floor(ev.time));
            CHECK(ev.time >= 0.0);
            CHECK(ev.time < cfg.duration);
            CHECK(ev.from != ev.to);
            ++per_od[{int(ev.from), int(ev.to)}];
        }
        counts.push_back(a.size());
        total += double(a.size());
    }
    // 20 independent runs of Binomial(64800, 1200/64800): the mean count sits
    // within four standard errors of 1200
    double mean = total / 20.0;
    CHECK(std::abs(mean - 1200.0) < 31.0);
    // each od pair receives an even share (mean 2000 per pair, 4 sigma = 177)
    REQUIRE(per_od.size() == 12);
    for (const auto& [od, n] : per_od) {
        CAPTURE(od.first);
        CAPTURE(od.second);
        CHECK(std::abs(double(n) - total / 12.0) < 200.0);
    }
}

TEST_CASE("penetration rate flips vehicle class without moving arrivals") {
    WorldConfig cfg;
    cfg.seed = 5;
    cfg.cav_penetration = 0.0;
    auto hdv = generate_arrivals(cfg);
    cfg.cav_penetration = 1.0;
    auto cav = generate_arrivals(cfg);
    REQUIRE(hdv.size() == cav.size());
    REQUIRE(!hdv.empty());
    for (std::size_t i = 0; i < hdv.size(); ++i) {
        CHECK(hdv[i].time == cav[i].time);
        CHECK(hdv[i].from == cav[i].from);
        CHECK(hdv[i].to == cav[i].to);
        CHECK(hdv[i].kind == VehicleKind::Hdv);
        CHECK(cav[i].kind == VehicleKind::Cav);
    }

    cfg.cav_penetration = 0.3;
    double cavs = 0.0, total = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        cfg.seed = seed;
        for (const auto& ev : generate_arrivals(cfg)) {
            total += 1.0;
            cavs += ev.kind == VehicleKind::Cav;
        }
    }
    CHECK(std::abs(cavs / total - 0.3) < 0.015);
}

TEST_CASE("a lone connected vehicle cruises the corridor at the speed limit") {
    WorldConfig cfg;
    cfg.duration = 600.0;
    cfg.expected_vehicles = 4.0;
    cfg.seed = 11;  // first arrival: t=68, E to W straight, next one at t=232
    cfg.cav_penetration = 1.0;

    auto arrivals = generate_arrivals(cfg);
    REQUIRE(arrivals.size() >= 2);
    REQUIRE(arrivals[0].time == 68.0);
    REQUIRE(arrivals[0].from == Approach::East);
    REQUIRE(arrivals[0].to == Approach::West);
    REQUIRE(arrivals[1].time > 150.0);

    World w(cfg);
    SignalState green = held_green(Phase::EWA);
    while (w.time() < 68.0) w.step(green);
    REQUIRE(w.vehicles_spawned() == 0);

    w.step(green);  // arrival inserted at the head of this step
    REQUIRE(w.vehicles_spawned() == 1);

    // position follows 750 - v*dt exactly: no dawdle, no constraint
    const double v = cfg.speed_limit;
    for (int k = 1; w.time() < 68.0 + 54.0; ++k) {
        bool found = false;
        w.for_each_vehicle([&](const Vehicle& veh) {
            found = true;
            CHECK(veh.speed == doctest::Approx(v).epsilon(1e-12));
            CHECK(veh.pos ==
                  doctest::Approx(cfg.approach_length - v * k).epsilon(1e-9));
        });
        REQUIRE(found);
        w.step(green);
    }
    // 750 m approach plus the 24 m straight path at 13.89 m/s: 56 steps
    while (w.vehicles_completed() == 0 && w.time() < 140.0) w.step(green);
    CHECK(w.vehicles_completed() == 1);
    CHECK(w.mean_travel_time() == doctest::Approx(56.0));
    CHECK(w.vehicles_in_network() == 0);
}

TEST_CASE("human drivers dawdle, so they never beat the connected run") {
    WorldConfig cfg;
    cfg.duration = 600.0;
    cfg.expected_vehicles = 4.0;
    cfg.seed = 11;
    cfg.cav_penetration = 0.0;
    World w(cfg);
    SignalState green = held_green(Phase::EWA);
    while (w.vehicles_completed() == 0 && w.time() < 200.0) w.step(green);
    REQUIRE(w.vehicles_completed() == 1);
    CHECK(w.mean_travel_time() >= 56.0);
    CHECK(w.mean_travel_time() < 75.0);  // sigma=0.5 dawdle costs a little
}

TEST_CASE("red approaches queue without overlap and never cross the line") {
    for (double pr : {0.0, 1.0}) {
        CAPTURE(pr);
        WorldConfig cfg;
        cfg.duration = 600.0;
        cfg.expected_vehicles = 900.0;
        cfg.seed = 42;
        cfg.cav_penetration = pr;
        World w(cfg);
        SignalState ns = held_green(Phase::NSA);  // East/West all red

        int ew_seen = 0;
        while (w.time() < 400.0) {
            w.step(ns);
            check_spacing(w);
            for (int a : {int(Approach::East), int(Approach::West)}) {
                for (int lane = 0; lane < kLanesPerApproach; ++lane) {
                    int li = World::lane_id(static_cast<Approach>(a), lane);
                    CHECK(w.box_lane(li).empty());  // red is never crossed
                    for (const Vehicle& veh : w.approach_lane(li)) {
                        CHECK(veh.pos >= -1e-9);
                        ++ew_seen;
                    }
                }
            }
        }
        REQUIRE(ew_seen > 0);

        // the head of some blocked lane is pinned at the line
        bool pinned = false;
        for (int a : {int(Approach::East), int(Approach::West)})
            for (int lane = 0; lane < kLanesPerApproach; ++lane) {
                const auto& q =
                    w.approach_lane(World::lane_id(static_cast<Approach>(a), lane));
                if (!q.empty() && q.front().speed < 0.1 && q.front().pos < 3.0)
                    pinned = true;
            }
        CHECK(pinned);
    }
}

TEST_CASE("waiting time accrues one second per stopped second") {
    WorldConfig cfg;
    cfg.duration = 600.0;
    cfg.expected_vehicles = 200.0;
    cfg.seed = 8;
    World w(cfg);
    SignalState ns = held_green(Phase::NSA);
    // let a blocked East/West queue build, then watch one stopped vehicle
    while (w.time() < 250.0) w.step(ns);
    int id = -1;
    double wait0 = 0.0;
    for (int a : {int(Approach::East), int(Approach::West)})
        for (int lane = 0; lane < kLanesPerApproach && id < 0; ++lane) {
            const auto& q =
                w.approach_lane(World::lane_id(static_cast<Approach>(a), lane));
            if (!q.empty() && q.front().speed < 0.1) {
                id = q.front().id;
                wait0 = q.front().wait;
            }
        }
    REQUIRE(id >= 0);
    for (int k = 1; k <= 20; ++k) {
        w.step(ns);
        w.for_each_vehicle([&](const Vehicle& v) {
            if (v.id == id) {
                CHECK(v.speed < 0.1);
                CHECK(v.wait == doctest::Approx(wait0 + k * cfg.dt));
            }
        });
    }
    CHECK(w.accumulated_total_waiting() > 0.0);
    CHECK(w.total_delay() >= w.accumulated_total_waiting() - 1e-9);
}

TEST_CASE("spawned vehicles are always either in the network or completed") {
    WorldConfig cfg;
    cfg.duration = 600.0;
    cfg.expected_vehicles = 700.0;
    cfg.seed = 17;
    cfg.cav_penetration = 0.5;
    World w(cfg);
    for (int k = 0; k < 500; ++k) {
        w.step(fixed_time_next(w.time()));
        CHECK(w.vehicles_spawned() ==
              w.vehicles_completed() + w.vehicles_in_network());
    }
    CHECK(w.vehicles_spawned() > 0);
    CHECK(w.vehicles_completed() > 0);
}

TEST_CASE("vehicles only ever occupy lanes their turn may use") {
    WorldConfig cfg;
    cfg.duration = 400.0;
    cfg.expected_vehicles = 900.0;
    cfg.seed = 23;
    cfg.cav_penetration = 0.3;
    World w(cfg);
    for (int k = 0; k < 350; ++k) {
        w.step(fixed_time_next(w.time()));
        w.for_each_vehicle([&](const Vehicle& v) {
            CHECK(turn_allowed_in_lane(v.lane, v.movement.turn));
        });
    }
}

TEST_CASE("nobody enters the box while their movement shows red") {
    for (double pr : {0.0, 1.0}) {
        CAPTURE(pr);
        WorldConfig cfg;
        cfg.duration = 400.0;
        cfg.expected_vehicles = 1000.0;
        cfg.seed = 31;
        cfg.cav_penetration = pr;
        World w(cfg);

        std::set<int> in_box;
        for (int k = 0; k < 360; ++k) {
            SignalState sig = fixed_time_next(w.time());
            w.step(sig);
            for (int li = 0; li < World::kLanes; ++li)
                for (const Vehicle& v : w.box_lane(li))
                    if (in_box.insert(v.id).second) {
                        // fresh entrant: the light it faced cannot have been red
                        CAPTURE(v.id);
                        CHECK(signal_color(sig, v.movement) != SignalColor::Red);
                    }
        }
        REQUIRE(!in_box.empty());
    }
}

TEST_CASE("saturated arrivals defer instead of stacking vehicles") {
    WorldConfig cfg;
    cfg.duration = 300.0;
    cfg.expected_vehicles = 4000.0;  // above one per od pair per second
    cfg.seed = 2;
    cfg.cav_penetration = 0.5;
    World w(cfg);
    for (int k = 0; k < 300; ++k) {
        w.step(fixed_time_next(w.time()));
        CHECK(w.vehicles_spawned() ==
              w.vehicles_completed() + w.vehicles_in_network());
    }
    check_spacing(w);
    CHECK(w.vehicles_spawned() > 500);
    CHECK(w.vehicles_spawned() < 3600);  // insertion is speed limited
    CHECK(w.vehicles_in_network() > 100);
}

TEST_CASE("identical seeds replay the identical world") {
    WorldConfig cfg;
    cfg.duration = 600.0;
    cfg.expected_vehicles = 600.0;
    cfg.seed = 9;
    cfg.cav_penetration = 0.4;
    World a(cfg), b(cfg);
    for (int k = 0; k < 300; ++k) {
        a.step(fixed_time_next(a.time()));
        b.step(fixed_time_next(b.time()));
        if (k % 50 == 0) REQUIRE(a.snapshot() == b.snapshot());
    }
    CHECK(a.snapshot() == b.snapshot());
    CHECK(a.vehicles_spawned() == b.vehicles_spawned());
    CHECK(a.vehicles_completed() == b.vehicles_completed());
    CHECK(a.total_delay() == b.total_delay());

    cfg.seed = 10;
    World c(cfg);
    for (int k = 0; k < 300; ++k) c.step(fixed_time_next(c.time()));
    CHECK(c.snapshot() != a.snapshot());
}

TEST_SUITE_END();
