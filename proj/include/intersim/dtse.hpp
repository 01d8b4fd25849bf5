#pragma once

#include <Eigen/Core>

#include "intersim/world.hpp"

namespace intersim {

// Binary occupancy encoding of the four approaches. Per approach two lane
// groups (the left-turn lane; the three through/right lanes merged), per
// group ten cells with configurable boundaries. Cell 0 starts at the stop
// line; vehicles inside the box are not encoded. Layout:
// index = approach*20 + group*10 + cell, approaches in N,E,S,W order,
// group 0 = left lane, cells ordered near to far.
class DtseEncoder {
  public:
    explicit DtseEncoder(std::vector<double> boundaries);

    static constexpr int kCells = 80;

    // -1 when the position is outside [0, last boundary].
    int cell_of(double pos) const;

    Eigen::VectorXd encode(const World& w) const;

  private:
    std::vector<double> bounds_;
};

}  // namespace intersim
