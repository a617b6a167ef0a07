#pragma once

#include <cstddef>
#include <vector>

#include "dirmax/cap_cover.hpp"
#include "dirmax/direction.hpp"

namespace dirmax {

// Distance from the unit vector v to the hyperplane w^perp, i.e. |v . w|.
double dist_to_hyperplane(const Direction& v, const Direction& w);

// (1 + c) 2^l delta_j: the hyperplane-proximity threshold for cap j at level l.
double level_threshold(double delta_j, double c, int l);

// Smallest l >= 0 with (1 + c) 2^l delta_j >= 1; shells beyond it are empty.
int saturation_level(double delta_j, double c);
int saturation_level(const CapCover& cover);

// #{j : |v_j . w| <= (1 + c) 2^l delta_j}.
int count_at(const Direction& w, const CapCover& cover, int l);

// Two-sided bracket of E_l = sup_w count_at(w, l).
struct ElBracket {
  int l = 0;
  int lower = 0;   // realized: count_at(witness_w, l) == lower
  int upper = 0;   // max over a rho-dense sample of the rho-slackened count
  Direction witness_w;
  double sample_resolution = 0.0;
};

struct BracketOptions {
  bool refine = true;
  std::size_t max_samples = 20'000'000;
};

// Default sample resolution: min_j delta_j / 16.
double default_resolution(const CapCover& cover);

ElBracket bracket_El(const CapCover& cover, int l, double resolution, const BracketOptions& opts = {});
// Brackets for l = 0..l_max from a single pass over the sample.
std::vector<ElBracket> bracket_El_range(const CapCover& cover, int l_max, double resolution,
                                        const BracketOptions& opts = {});

// Greedy maximal scale-separated subset of omega as centers, every point
// assigned to its nearest center (ties to the lowest center index), all
// diameters equal to `scale`.
CapCover build_cap_cover(const DirectionSet& omega, double scale, double c = 1.0);

}  // namespace dirmax
