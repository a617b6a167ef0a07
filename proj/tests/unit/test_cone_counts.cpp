#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dirmax/cone_counts.hpp"
#include "dirmax/error.hpp"
#include "dirmax/sphere_nets.hpp"
#include "oracles.hpp"

using namespace dirmax;

namespace {

CapCover manual_cover(const std::vector<Direction>& centers, double delta, double c) {
  CapCover cov;
  cov.centers = centers;
  cov.diameters.assign(centers.size(), delta);
  for (std::size_t j = 0; j < centers.size(); ++j) cov.membership.push_back(static_cast<int>(j));
  cov.slack_c = c;
  return cov;
}

// Independent count: #{j : |v_j . w| <= (1 + c) 2^l delta_j}.
int brute_count(const Direction& w, const CapCover& cov, int l) {
  int n = 0;
  for (std::size_t j = 0; j < cov.centers.size(); ++j) {
    double d = 0.0;
    for (int i = 0; i < w.dim(); ++i) d += cov.centers[j][i] * w[i];
    if (std::abs(d) <= (1.0 + cov.slack_c) * std::ldexp(cov.diameters[j], l)) ++n;
  }
  return n;
}

// sup over an angle grid of step rho on the circle.
int brute_sup_circle(const CapCover& cov, int l, double rho) {
  int best = 0;
  const int steps = static_cast<int>(std::ceil(2.0 * std::numbers::pi / rho));
  for (int s = 0; s < steps; ++s) {
    const double a = 2.0 * std::numbers::pi * s / steps;
    best = std::max(best, brute_count(Direction::normalized({std::cos(a), std::sin(a)}), cov, l));
  }
  return best;
}

}  // namespace

TEST_SUITE("cone_counts") {

TEST_CASE("distance to a hyperplane") {
  const auto e1 = Direction::axis(2, 0), e2 = Direction::axis(2, 1);
  CHECK(dist_to_hyperplane(e1, e1) == doctest::Approx(1.0));
  CHECK(dist_to_hyperplane(e1, e2) == doctest::Approx(0.0));
  CHECK(dist_to_hyperplane(Direction::normalized({1.0, 1.0}), e1) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(dist_to_hyperplane(-e1, e1) == doctest::Approx(1.0));
}

TEST_CASE("thresholds and saturation") {
  CHECK(level_threshold(0.1, 1.0, 0) == doctest::Approx(0.2));
  CHECK(level_threshold(0.1, 0.5, 3) == doctest::Approx(1.2));
  // (1 + c) 2^L delta >= 1 first at L = 2 for delta = 0.1, c = 1.
  CHECK(saturation_level(0.1, 1.0) == 3);
  CHECK(saturation_level(0.5, 1.0) == 0);
  CHECK(saturation_level(0.05, 1.0) == 4);
}

TEST_CASE("single center seen from itself") {
  const auto v = Direction::normalized({0.3, -0.2, 0.9});
  const auto cov = manual_cover({v}, 0.1, 1.0);
  CHECK(count_at(v, cov, 0) == 0);
  CHECK(count_at(v, cov, 1) == 0);
  CHECK(count_at(v, cov, saturation_level(cov)) == 1);
}

TEST_CASE("saturated level counts every cap") {
  const auto net = build_maximal_net(3, 0.3, 2);
  const auto cov = build_cap_cover(net, 0.3);
  const int L = saturation_level(cov);
  for (const auto& w : oracle::sphere_sample(3, 200)) {
    CHECK(count_at(w, cov, L) == static_cast<int>(cov.cap_count()));
    CHECK(count_at(w, cov, L + 3) == static_cast<int>(cov.cap_count()));
  }
}

TEST_CASE("two orthogonal centers on the circle") {
  const auto cov = manual_cover({Direction::axis(2, 0), Direction::axis(2, 1)}, 0.1, 1.0);
  CHECK(count_at(Direction::axis(2, 1), cov, 0) == 1);
  CHECK(brute_sup_circle(cov, 0, 1e-3) == 1);
  const auto br = bracket_El(cov, 0, 1e-3);
  CHECK(br.lower == 1);
  CHECK(br.upper == 1);
  CHECK(brute_count(br.witness_w, cov, 0) == br.lower);
}

TEST_CASE("single cap bracket below saturation") {
  const auto cov = manual_cover({Direction::normalized({1.0, 2.0, 2.0})}, 0.05, 1.0);
  for (int l = 0; l < saturation_level(cov); ++l) {
    const auto br = bracket_El(cov, l, 0.01);
    CHECK(br.lower == 1);
    CHECK(br.upper == 1);
    CHECK(count_at(br.witness_w, cov, l) == 1);
  }
}

TEST_CASE("count_at matches the brute-force count") {
  const auto net = build_maximal_net(3, 0.2, 4);
  const auto cov = build_cap_cover(net, 0.4, 0.7);
  for (const auto& w : oracle::sphere_sample(3, 300))
    for (int l = 0; l <= 3; ++l) CHECK(count_at(w, cov, l) == brute_count(w, cov, l));
}

TEST_CASE("brackets are consistent with a finer scan") {
  const auto net = build_maximal_net(3, 0.15, 6);
  const auto cov = build_cap_cover(net, 0.3);
  const double rho = default_resolution(cov);
  const auto coarse = bracket_El_range(cov, 3, rho);
  const auto fine = bracket_El_range(cov, 3, rho / 4.0);
  REQUIRE(coarse.size() == 4);
  for (int l = 0; l <= 3; ++l) {
    CHECK(coarse[l].lower <= coarse[l].upper);
    CHECK(fine[l].lower <= coarse[l].upper);
    CHECK(coarse[l].lower <= fine[l].upper);
    CHECK(count_at(coarse[l].witness_w, cov, l) == coarse[l].lower);
    if (l > 0) CHECK(coarse[l].lower >= coarse[l - 1].lower);
  }
  // The brute sup over an independent sample never exceeds the upper bound.
  for (int l = 0; l <= 3; ++l) {
    int best = 0;
    for (const auto& w : oracle::sphere_sample(3, 20000)) best = std::max(best, brute_count(w, cov, l));
    CHECK(best <= coarse[l].upper);
  }
}

TEST_CASE("circle brackets agree with an exhaustive angle scan") {
  const auto net = build_maximal_net(2, 0.05, 3);
  const auto cov = build_cap_cover(net, 0.1);
  for (int l = 0; l <= 2; ++l) {
    const auto br = bracket_El(cov, l, 1e-3);
    const int scan = brute_sup_circle(cov, l, 1e-4);
    CHECK(br.lower <= scan);
    CHECK(scan <= br.upper);
  }
}

TEST_CASE("first-level counts scale like the inverse separation on S^2") {
  // Covers of a net by its own points; constant fitted at the largest scale.
  const std::vector<double> deltas{0.2, 0.1, 0.05};
  double k_lower = 0.0, k_upper = 0.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double d = deltas[i];
    const auto cov = build_cap_cover(build_maximal_net(3, d, 1), d);
    const auto br = bracket_El(cov, 0, d / 8.0);
    const double lo = br.lower * d, up = br.upper * d;
    if (i == 0) {
      k_lower = lo;
      k_upper = up;
    }
    CHECK(lo >= k_lower / 4.0);
    CHECK(lo <= k_lower * 4.0);
    CHECK(up >= k_upper / 4.0);
    CHECK(up <= k_upper * 4.0);
  }
}

TEST_CASE("cover at the set diameter is a single cap") {
  const auto net = build_maximal_net(3, 0.4, 1);
  const auto cov = build_cap_cover(net, 2.0);
  CHECK(cov.cap_count() == 1);
  CHECK(cov.caps()[0].size() == net.size());
  CHECK(validate_cover(cov, net, true));
}

TEST_CASE("cover at the separation has singleton caps") {
  const auto net = build_maximal_net(3, 0.25, 1);
  const auto cov = build_cap_cover(net, net.separation);
  CHECK(cov.cap_count() == net.size());
  for (const auto& cap : cov.caps()) CHECK(cap.size() == 1);
  CHECK(validate_cover(cov, net, true));
}

TEST_CASE("cover at five times the separation partitions the net") {
  const auto net = build_maximal_net(3, 0.05, 1);
  const auto cov = build_cap_cover(net, 0.25);
  CHECK(validate_cover(cov, net, true));
  std::size_t all = 0;
  for (const auto& cap : cov.caps()) {
    CHECK(!cap.empty());
    CHECK(cap.size() <= 200);
    all += cap.size();
    for (int i : cap) CHECK(oracle::chord(net.points[i], cov.centers[cov.membership[i]]) <= 0.25);
  }
  CHECK(all == net.size());
  // Centers are scale-separated.
  CHECK(oracle::min_pair(cov.centers) >= 0.25 * (1.0 - 1e-12));
}

TEST_CASE("cover and bracket errors") {
  const auto net = build_maximal_net(3, 0.3, 1);
  CHECK_THROWS_AS(build_cap_cover(net, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(build_cap_cover(net, 0.6, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_cap_cover(net, 0.6, 1.5), std::invalid_argument);
  const auto cov = build_cap_cover(net, 0.6);
  CHECK_THROWS_AS(bracket_El(cov, 0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(bracket_El(cov, -1, 0.1), std::invalid_argument);
  BracketOptions small;
  small.max_samples = 100;
  CHECK_THROWS_AS(bracket_El(cov, 0, 1e-3, small), NumericError);
}

}  // TEST_SUITE
