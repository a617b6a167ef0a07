#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dirmax {

// A unit vector in R^n.
class Direction {
 public:
  Direction() = default;

  // Normalizes `coords`; throws std::invalid_argument on a zero or non-finite vector.
  static Direction normalized(std::vector<double> coords);
  // Keeps `coords` bit for bit; throws std::invalid_argument unless |coords| is within tol of 1.
  static Direction from_unit(std::vector<double> coords, double tol);
  // Standard basis vector e_{axis} (0-based) in R^dim.
  static Direction axis(int dim, int axis);

  int dim() const { return static_cast<int>(coords_.size()); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }

  Direction operator-() const;
  bool operator==(const Direction&) const = default;

 private:
  explicit Direction(std::vector<double> c) : coords_(std::move(c)) {}
  std::vector<double> coords_;
};

double dot(std::span<const double> a, std::span<const double> b);
inline double dot(const Direction& a, const Direction& b) { return dot(a.coords(), b.coords()); }
double distance(const Direction& a, const Direction& b);

// Component of `v` orthogonal to `axis`, normalized. Throws if v is parallel to axis.
Direction orthogonal_component(const Direction& v, const Direction& axis);

// A finite direction set together with its declared separation and diameter.
struct DirectionSet {
  int dim = 0;
  std::vector<Direction> points;
  double separation = 0.0;
  std::optional<double> diameter_bound;  // empty means "full sphere"

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  // Row-major n x size() copy, used by tight inner loops.
  std::vector<double> flat() const;
};

// Separation checks tolerate this much relative floating-point slack; a
// regular hexagon of unit chords, for instance, evaluates its chords to 1 - 1ulp.
inline constexpr double kSeparationRelTol = 1e-12;

double min_pairwise_distance(const DirectionSet& set);
double max_pairwise_distance(const DirectionSet& set);
// All-pairs check of the declared separation (and diameter bound, if finite).
bool satisfies_invariants(const DirectionSet& set);

}  // namespace dirmax
