#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dirmax/cap_cover.hpp"
#include "dirmax/direction.hpp"
#include "dirmax/rng.hpp"

namespace dirmax {

// Greedy maximal delta-separated subset of S^{dim-1}. Dim 2 is a regular
// polygon. Dim 3 seeds a rotated spiral, then fills every hole exactly from
// the intersection points of neighbouring cap boundaries. Higher dimensions
// use uniform points, then climb into holes from a rotated covering grid.
// Deterministic in (dim, delta, seed).
DirectionSet build_maximal_net(int dim, double delta, std::uint64_t seed);

// Order-1 lacunary sequence normalize(center + ratio^k * radius * tangent), k < count.
struct LacunarySpec {
  Direction cap_center;
  Direction tangent;
  double ratio = 0.5;
  int count = 1;
  double cap_radius = 0.1;

  void validate() const;
};

DirectionSet build_lacunary(const LacunarySpec& spec);

// Template for the per-cap lacunary sets of a mixed set; center and tangent are
// filled in per cap.
struct LacunaryTemplate {
  double ratio = 0.5;
  int count = 1;
  double cap_radius = 0.1;
};

struct MixedSet {
  DirectionSet omega;
  CapCover cover;       // centers are the net points (not members of omega)
  DirectionSet centers; // the delta-net of cap centers
};

// A delta-net of cap centers with one lacunary sequence in each cap; the caps
// have diameter delta and must not overlap (cap_radius < delta / 2).
MixedSet build_mixed_set(int dim, double delta, const LacunaryTemplate& per_cap, std::uint64_t seed);

// Points whose arc distance covers S^{dim-1} to within `radius` (so chord
// distance too). `hemisphere` keeps only points with first coordinate >= 0,
// which still covers the sphere up to sign. Throws NumericError when more than
// `max_points` would be generated.
std::vector<double> covering_grid(int dim, double radius, bool hemisphere, std::size_t max_points);
std::size_t covering_grid_size(int dim, double radius, bool hemisphere);

// Largest distance from a test sample to the nearest net point. Uses a covering
// grid at `resolution` for dim <= 3, `max_samples` uniform points otherwise.
double sampled_covering_radius(const DirectionSet& net, double resolution, std::uint64_t seed,
                               std::size_t max_samples = 2'000'000);

// Uniform random rotation of R^dim (row-major dim x dim).
std::vector<double> random_rotation(int dim, Engine& eng);

}  // namespace dirmax
