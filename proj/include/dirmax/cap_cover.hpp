#pragma once

#include <vector>

#include "dirmax/direction.hpp"

namespace dirmax {

// A cover {O_j} of a direction set: cap centers v_j with diameters delta_j, the
// cap index of every covered point, and the slack constant c in (0, 1].
struct CapCover {
  std::vector<Direction> centers;
  std::vector<double> diameters;
  std::vector<int> membership;  // membership[i] = cap index of point i
  double slack_c = 1.0;

  std::size_t cap_count() const { return centers.size(); }
  // Point indices grouped by cap, in increasing point order.
  std::vector<std::vector<int>> caps() const;
  // The centers as a direction set (the representative set).
  DirectionSet center_set(int dim, double separation) const;
};

// Checks that every point lies within diameters[j] of its assigned center. With
// `centers_in_set`, also checks that each center coincides with a point of `omega`.
bool validate_cover(const CapCover& cover, const DirectionSet& omega, bool centers_in_set);

}  // namespace dirmax
