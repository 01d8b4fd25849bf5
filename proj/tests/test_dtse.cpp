#include <algorithm>
#include <vector>

#include "doctest.h"
#include "intersim/dtse.hpp"
#include "intersim/signal.hpp"
#include "intersim/world.hpp"

using namespace intersim;

TEST_SUITE_BEGIN("dtse");

namespace {

const std::vector<double> kDefaultBounds = {7,  14, 21,  28,  40,
                                            60, 100, 160, 400, 750};

// Reference binning written independently of the encoder: first boundary
// strictly above the position wins, the last one inclusively.
int ref_cell(const std::vector<double>& bounds, double pos) {
    if (pos < 0.0 || pos > bounds.back()) return -1;
    auto it = std::upper_bound(bounds.begin(), bounds.end(), pos);
    if (it == bounds.end()) return int(bounds.size()) - 1;  // pos == back
    return int(it - bounds.begin());
}

Eigen::VectorXd ref_encode(const World& w, const std::vector<double>& bounds) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(DtseEncoder::kCells);
    for (int a = 0; a < kNumApproaches; ++a)
        for (int lane = 0; lane < kLanesPerApproach; ++lane)
            for (const Vehicle& v :
                 w.approach_lane(World::lane_id(static_cast<Approach>(a), lane))) {
                int c = ref_cell(bounds, v.pos);
                if (c >= 0) s[a * 20 + (lane == 0 ? 0 : 1) * 10 + c] = 1.0;
            }
    return s;
}

}  // namespace

TEST_CASE("cell boundaries bin positions near to far, stop line inclusive") {
    DtseEncoder enc(kDefaultBounds);
    struct Probe {
        double pos;
        int cell;
    };
    const Probe probes[] = {
        {0.0, 0},    {3.5, 0},    {6.999, 0}, {7.0, 1},   {13.99, 1},
        {14.0, 2},   {20.0, 2},   {27.9, 3},  {28.0, 4},  {39.99, 4},
        {40.0, 5},   {59.0, 5},   {60.0, 6},  {99.0, 6},  {100.0, 7},
        {159.0, 7},  {160.0, 8},  {399.9, 8}, {400.0, 9}, {749.0, 9},
        {750.0, 9},  // far edge is part of the last cell
    };
    for (const auto& p : probes) {
        CAPTURE(p.pos);
        CHECK(enc.cell_of(p.pos) == p.cell);
    }
    CHECK(enc.cell_of(-0.01) == -1);
    CHECK(enc.cell_of(750.01) == -1);
}

TEST_CASE("boundary lists must be ten increasing positive values") {
    CHECK_THROWS_AS(DtseEncoder({1, 2, 3}), ConfigError);
    CHECK_THROWS_AS(DtseEncoder(std::vector<double>{}), ConfigError);
    CHECK_THROWS_AS(DtseEncoder({7, 14, 21, 28, 40, 60, 100, 160, 400, 400}),
                    ConfigError);
    CHECK_THROWS_AS(DtseEncoder({7, 14, 21, 28, 40, 60, 100, 400, 160, 750}),
                    ConfigError);
    CHECK_THROWS_AS(DtseEncoder({0, 14, 21, 28, 40, 60, 100, 160, 400, 750}),
                    ConfigError);
    CHECK_THROWS_AS(DtseEncoder({-7, 14, 21, 28, 40, 60, 100, 160, 400, 750}),
                    ConfigError);
    CHECK_NOTHROW(DtseEncoder{kDefaultBounds});
}

TEST_CASE("an empty world encodes to the zero vector") {
    WorldConfig cfg;
    cfg.expected_vehicles = 0.0;
    cfg.duration = 100.0;
    World w(cfg);
    DtseEncoder enc(cfg.dtse_boundaries);
    Eigen::VectorXd s = enc.encode(w);
    REQUIRE(s.size() == DtseEncoder::kCells);
    CHECK(s.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a vehicle held at a red light sets exactly the stop-line cell") {
    WorldConfig cfg;
    cfg.duration = 600.0;
    cfg.expected_vehicles = 4.0;  // sparse, the first arrival stays isolated
    cfg.seed = 7;

    auto arrivals = generate_arrivals(cfg);
    REQUIRE(!arrivals.empty());
    const ArrivalEvent first = arrivals.front();
    Movement fm{first.from, turn_between(first.from, first.to)};

    // hold a phase that never serves the first vehicle
    SignalState red;
    for (int p = 0; p < kNumPhases; ++p)
        if (!phase_serves(static_cast<Phase>(p), fm)) {
            red.phase = static_cast<Phase>(p);
            red.pending = red.phase;
            break;
        }
    red.yellow = false;
    red.remaining = 1e9;

    World w(cfg);
    while (w.time() < first.time + 150.0) w.step(red);

    const Vehicle* held = nullptr;
    int held_lane = -1;
    for (int lane = 0; lane < kLanesPerApproach; ++lane)
        for (const Vehicle& v :
             w.approach_lane(World::lane_id(first.from, lane)))
            if (v.id == 0) {
                held = &v;
                held_lane = lane;
            }
    REQUIRE(held != nullptr);
    CHECK(held->speed < 0.1);
    CHECK(held->pos >= 0.0);
    CHECK(held->pos < 7.0);

    DtseEncoder enc(cfg.dtse_boundaries);
    Eigen::VectorXd s = enc.encode(w);
    int idx = static_cast<int>(first.from) * 20 + (held_lane == 0 ? 0 : 1) * 10;
    CHECK(s[idx] == 1.0);
    // nothing but this queue's cells may be lit on that approach group
    CHECK(s.sum() == doctest::Approx(ref_encode(w, cfg.dtse_boundaries).sum()));
}

TEST_CASE("encoding matches an independent reconstruction while running") {
    WorldConfig cfg;
    cfg.duration = 600.0;
    cfg.expected_vehicles = 400.0;
    cfg.seed = 42;
    World w(cfg);
    DtseEncoder enc(cfg.dtse_boundaries);

    double lit = 0.0;
    for (int step = 0; step < 300; ++step) {
        w.step(fixed_time_next(w.time()));
        Eigen::VectorXd got = enc.encode(w);
        Eigen::VectorXd want = ref_encode(w, cfg.dtse_boundaries);
        REQUIRE(got.size() == want.size());
        CHECK((got - want).cwiseAbs().maxCoeff() == 0.0);
        for (int i = 0; i < got.size(); ++i)
            CHECK((got[i] == 0.0 || got[i] == 1.0));
        lit += got.sum();
    }
    CHECK(lit > 0.0);  // the run actually exercised occupied cells
}

TEST_CASE("two vehicles in one cell still encode as a single one") {
    // queue builds up behind a red: front cells saturate at 1
    WorldConfig cfg;
    cfg.duration = 400.0;
    cfg.expected_vehicles = 600.0;
    cfg.seed = 3;
    World w(cfg);

    SignalState red;  // NSA green means every East/West movement waits
    red.phase = Phase::NSA;
    red.pending = Phase::NSA;
    red.remaining = 1e9;

    int queued = 0;
    while (w.time() < 350.0) w.step(red);
    for (int lane = 0; lane < kLanesPerApproach; ++lane)
        for (const Vehicle& v :
             w.approach_lane(World::lane_id(Approach::East, lane)))
            queued += (v.pos <= 7.0);
    REQUIRE(queued > 2);  // cell 0 holds at most one 5 m car per lane, so the
                          // merged through group must be sharing cells

    DtseEncoder enc(cfg.dtse_boundaries);
    Eigen::VectorXd s = enc.encode(w);
    CHECK(s.maxCoeff() == 1.0);
    Eigen::VectorXd want = ref_encode(w, cfg.dtse_boundaries);
    CHECK((s - want).cwiseAbs().maxCoeff() == 0.0);
}

TEST_SUITE_END();
