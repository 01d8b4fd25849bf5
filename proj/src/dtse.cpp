#include "intersim/dtse.hpp"

namespace intersim {

DtseEncoder::DtseEncoder(std::vector<double> boundaries)
    : bounds_(std::move(boundaries)) {
    if (bounds_.size() != 10)
        throw ConfigError("DtseEncoder: exactly 10 cell boundaries required");
    double prev = 0.0;
    for (double b : bounds_) {
        if (b <= prev) throw ConfigError("DtseEncoder: boundaries must increase");
        prev = b;
    }
}

int DtseEncoder::cell_of(double pos) const {
    if (pos < 0.0 || pos > bounds_.back()) return -1;
    for (std::size_t i = 0; i < bounds_.size(); ++i)
        if (pos < bounds_[i] || (i + 1 == bounds_.size() && pos <= bounds_[i]))
            return int(i);
    return -1;
}

Eigen::VectorXd DtseEncoder::encode(const World& w) const {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(kCells);
    for (int a = 0; a < kNumApproaches; ++a) {
        for (int lane = 0; lane < kLanesPerApproach; ++lane) {
            int group = lane == 0 ? 0 : 1;
            for (const Vehicle& v :
                 w.approach_lane(World::lane_id(static_cast<Approach>(a), lane))) {
                int c = cell_of(v.pos);
                if (c >= 0) s[a * 20 + group * 10 + c] = 1.0;
            }
        }
    }
    return s;
}

}  // namespace intersim
