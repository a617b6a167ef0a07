#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "dirmax/sphere_nets.hpp"
#include "oracles.hpp"

using namespace dirmax;

TEST_SUITE("sphere_nets") {

TEST_CASE("unit chord on the circle gives the hexagon") {
  const auto net = build_maximal_net(2, 1.0, 1);
  CHECK(net.size() == 6);
  CHECK(oracle::min_pair(net.points) >= 1.0 * (1.0 - 1e-12));
  CHECK(oracle::covering_radius(net.points, oracle::sphere_sample(2, 4096)) <= 1.0);
}

TEST_CASE("two-sphere net at 0.2 has the expected size and is maximal") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto net = build_maximal_net(3, 0.2, seed);
    CHECK(net.size() >= 13);
    CHECK(net.size() <= 200);
    CHECK(oracle::min_pair(net.points) >= 0.2 * (1.0 - 1e-12));
    CHECK(oracle::covering_radius(net.points, oracle::sphere_sample(3, 20000)) <= 0.2);
    CHECK(satisfies_invariants(net));
  }
}

TEST_CASE("nets satisfy their own invariants") {
  for (double d : {1.7, 0.9, 0.3, 0.05, 0.011}) {
    const auto net = build_maximal_net(2, d, 4);
    CHECK(satisfies_invariants(net));
    CHECK(oracle::covering_radius(net.points, oracle::sphere_sample(2, 20000)) <= d);
  }
  const auto n4 = build_maximal_net(4, 0.5, 2);
  CHECK(satisfies_invariants(n4));
  CHECK(oracle::min_pair(n4.points) >= 0.5 * (1.0 - 1e-12));
  CHECK(sampled_covering_radius(n4, 0.0625, 3, 200000) <= 0.5);
}

TEST_CASE("library covering estimate agrees with the brute-force one") {
  const auto net = build_maximal_net(3, 0.3, 5);
  const double lib = sampled_covering_radius(net, 0.3 / 8.0, 1);
  const double ref = oracle::covering_radius(net.points, oracle::sphere_sample(3, 20000));
  CHECK(lib <= 0.3);
  CHECK(std::abs(lib - ref) <= 0.3 / 8.0 + 0.02);
}

TEST_CASE("same seed gives a bit-identical net") {
  const auto a = build_maximal_net(3, 0.15, 9);
  const auto b = build_maximal_net(3, 0.15, 9);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.points[i] == b.points[i]);
  const auto c = build_maximal_net(3, 0.15, 10);
  bool differs = c.size() != a.size();
  for (std::size_t i = 0; !differs && i < a.size(); ++i) differs = !(a.points[i] == c.points[i]);
  CHECK(differs);
}

TEST_CASE("degenerate separations are rejected") {
  CHECK_THROWS_AS(build_maximal_net(3, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_maximal_net(3, -0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_maximal_net(3, 2.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_maximal_net(1, 0.5, 1), std::invalid_argument);
}

TEST_CASE("single-element lacunary sequence") {
  LacunarySpec s{Direction::axis(3, 2), Direction::axis(3, 0), 0.5, 1, 0.1};
  const auto set = build_lacunary(s);
  REQUIRE(set.size() == 1);
  const double r = std::sqrt(1.0 + 0.01);
  CHECK(set.points[0][0] == doctest::Approx(0.1 / r).epsilon(1e-14));
  CHECK(set.points[0][1] == doctest::Approx(0.0));
  CHECK(set.points[0][2] == doctest::Approx(1.0 / r).epsilon(1e-14));
}

TEST_CASE("lacunary sequence follows the closed form") {
  LacunarySpec s{Direction::axis(3, 2), Direction::axis(3, 0), 0.5, 3, 0.1};
  const auto set = build_lacunary(s);
  REQUIRE(set.size() == 3);
  for (int k = 0; k < 3; ++k) {
    const double a = 0.1 * std::pow(0.5, k);
    const double norm = std::sqrt(1.0 + a * a);
    CHECK(set.points[k][0] == doctest::Approx(a / norm).epsilon(1e-14));
    CHECK(set.points[k][2] == doctest::Approx(1.0 / norm).epsilon(1e-14));
  }
  // First coordinates roughly 1 : 1/2 : 1/4.
  CHECK(set.points[1][0] / set.points[0][0] == doctest::Approx(0.5).epsilon(0.01));
  CHECK(set.points[2][0] / set.points[0][0] == doctest::Approx(0.25).epsilon(0.01));
}

TEST_CASE("lacunary gaps shrink geometrically and stay in the cap") {
  const double ratio = 0.6;
  LacunarySpec s{Direction::axis(3, 0), Direction::axis(3, 1), ratio, 10, 0.2};
  const auto set = build_lacunary(s);
  REQUIRE(set.size() == 10);
  std::vector<double> angle;
  for (const auto& p : set.points) {
    angle.push_back(std::acos(std::min(1.0, p[0])));
    CHECK(oracle::chord(p, s.cap_center) <= 0.2 * (1.0 + 1e-6));
  }
  for (int k = 0; k + 2 < 10; ++k) {
    const double g0 = angle[k] - angle[k + 1];
    const double g1 = angle[k + 1] - angle[k + 2];
    CHECK(std::abs(g1 / g0 - ratio) <= 0.1 * ratio);
  }
}

TEST_CASE("lacunary spec errors") {
  LacunarySpec s{Direction::axis(3, 2), Direction::axis(3, 0), 1.0, 3, 0.1};
  CHECK_THROWS_AS(build_lacunary(s), std::invalid_argument);
  s.ratio = 0.0;
  CHECK_THROWS_AS(build_lacunary(s), std::invalid_argument);
  s.ratio = 0.5;
  s.count = 0;
  CHECK_THROWS_AS(build_lacunary(s), std::invalid_argument);
  s.count = 3;
  s.tangent = Direction::normalized({1.0, 0.0, 1.0});
  CHECK_THROWS_AS(build_lacunary(s), std::invalid_argument);
}

TEST_CASE("mixed set with eight points per cap") {
  const auto mixed = build_mixed_set(3, 0.3, {0.5, 8, 0.1}, 3);
  CHECK(mixed.omega.size() == 8 * mixed.centers.size());
  CHECK(mixed.cover.cap_count() == mixed.centers.size());
  CHECK(validate_cover(mixed.cover, mixed.omega, false));
  const auto caps = mixed.cover.caps();
  for (std::size_t j = 0; j < caps.size(); ++j) {
    CHECK(caps[j].size() == 8);
    for (int i : caps[j]) CHECK(oracle::chord(mixed.omega.points[i], mixed.cover.centers[j]) <= mixed.cover.diameters[j]);
  }
  CHECK(oracle::min_pair(mixed.omega.points) >= mixed.omega.separation * (1.0 - 1e-12));
}

TEST_CASE("mixed set with one point per cap is a perturbed net") {
  const auto mixed = build_mixed_set(3, 0.3, {0.5, 1, 0.1}, 3);
  const auto net = build_maximal_net(3, 0.3, 3);
  CHECK(mixed.omega.size() == net.size());
  for (std::size_t i = 0; i < mixed.omega.size(); ++i)
    CHECK(oracle::chord(mixed.omega.points[i], mixed.centers.points[mixed.cover.membership[i]]) <= 0.1 + 1e-12);
}

TEST_CASE("mixed set errors") {
  CHECK_THROWS_AS(build_mixed_set(3, 1.2, {0.5, 2, 0.1}, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_mixed_set(3, 0.3, {0.5, 2, 0.2}, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_mixed_set(3, 0.3, {1.5, 2, 0.1}, 1), std::invalid_argument);
}

}  // TEST_SUITE
