#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "dirmax/direction.hpp"

// Independent reference computations: plain loops, no library helpers beyond
// the Direction type.
namespace oracle {

inline double chord(const dirmax::Direction& a, const dirmax::Direction& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline double min_pair(const std::vector<dirmax::Direction>& pts) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) m = std::min(m, chord(pts[i], pts[j]));
  return m;
}

// Fibonacci points on S^2 (or equally spaced angles on S^1).
inline std::vector<dirmax::Direction> sphere_sample(int dim, int count) {
  std::vector<dirmax::Direction> out;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    if (dim == 2) {
      const double a = 2.0 * std::numbers::pi * i / count;
      out.push_back(dirmax::Direction::normalized({std::cos(a), std::sin(a)}));
    } else {
      const double z = 1.0 - (2.0 * i + 1.0) / count;
      const double r = std::sqrt(1.0 - z * z);
      out.push_back(dirmax::Direction::normalized({r * std::cos(golden * i), r * std::sin(golden * i), z}));
    }
  }
  return out;
}

// Largest distance from a sample point to its nearest set point.
inline double covering_radius(const std::vector<dirmax::Direction>& pts, const std::vector<dirmax::Direction>& sample) {
  double worst = 0.0;
  for (const auto& s : sample) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) best = std::min(best, chord(s, p));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace oracle
