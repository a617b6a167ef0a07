#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dirmax/maximal_ops.hpp"
#include "dirmax/parallel.hpp"
#include "dirmax/quadrature.hpp"
#include "dirmax/sphere_nets.hpp"

using namespace dirmax;

namespace {

constexpr double kPi = std::numbers::pi;

GridField constant(int dim, int n, double len, double value) {
  GridField g(dim, n, len);
  for (auto& z : g.values()) z = value;
  return g;
}

// Positive smooth field.
GridField positive_field(int dim, int n, double len, std::uint64_t seed) {
  GridField f = random_band_limited_field(dim, n, len, 3, seed);
  for (auto& z : f.values()) z = 1.5 + z.real();
  return f;
}

// Chord [t-, t+] of the line x + t v through the unit ball (false if it misses).
bool chord(std::span<const double> x, const Direction& v, double& lo, double& hi) {
  double xv = 0.0, xx = 0.0;
  for (int i = 0; i < v.dim(); ++i) {
    xv += x[i] * v[i];
    xx += x[i] * x[i];
  }
  const double disc = xv * xv - xx + 1.0;
  if (disc <= 0.0) return false;
  // 1_B(x - v t): t in [xv - sqrt, xv + sqrt].
  lo = xv - std::sqrt(disc);
  hi = xv + std::sqrt(disc);
  return true;
}

double brute_average(std::span<const double> x, const Direction& v) {
  double lo, hi;
  if (!chord(x, v, lo, hi)) return 0.0;
  double best = 0.0;
  for (int i = 0; i <= 400000; ++i) {
    const double h = std::pow(10.0, -4.0 + 8.0 * i / 400000.0);
    const double len = std::max(0.0, std::min(h, hi) - std::max(-h, lo));
    best = std::max(best, len / (2.0 * h));
  }
  return best;
}

// (1/pi) p.v. integral of 1/t over the chord: the symmetric part around 0 cancels,
// the rest is integrated numerically.
double brute_hilbert(std::span<const double> x, const Direction& v) {
  double lo, hi;
  if (!chord(x, v, lo, hi)) return 0.0;
  double a = lo, b = hi;
  if (lo < 0.0 && hi > 0.0) {
    const double m = std::min(-lo, hi);
    if (-lo > hi) b = -m; else a = m;
    if (std::abs(a - b) < 1e-15) return 0.0;
  }
  return integrate([](double t) { return 1.0 / t; }, a, b, 2000, 16) / kPi;
}

}  // namespace

TEST_SUITE("maximal_ops") {

TEST_CASE("scale grids") {
  const auto g = ScaleGrid::geometric(0.25, 4.0);
  REQUIRE(g.h_values.size() == 5);
  CHECK(g.h_values.back() == doctest::Approx(4.0));
  const auto r = g.refined();
  CHECK(r.h_values.size() == 9);
  CHECK(r.h_values[1] == doctest::Approx(0.25 * std::sqrt(2.0)));
  ScaleGrid bad{{1.0, 2.0, 5.0}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(ScaleGrid::geometric(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ScaleGrid::geometric(1.0, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("constant inputs") {
  const auto one = constant(2, 32, 8.0, 1.0);
  const DirectionSet single{2, {Direction::normalized({0.6, 0.8})}, 2.0, std::nullopt};
  const auto net = build_maximal_net(2, 0.5, 1);
  const auto avg = maximal_average(one, single, ScaleGrid::for_grid(one));
  for (const auto& z : avg.output.values())
    CHECK(z.real() == doctest::Approx(1.0).epsilon(1e-12));
  const auto ss = single_scale_maximal(one, net);
  for (const auto& z : ss.output.values()) CHECK(z.real() == doctest::Approx(1.0).epsilon(1e-12));
  const auto sq = ScaleGrid::geometric(0.5, 4.0);
  const auto nk = nikodym_maximal(one, Direction::axis(2, 1), 0.25, sq);
  for (const auto& z : nk.values()) CHECK(z.real() == doctest::Approx(1.0));
  const int axes[2] = {0, 1};
  const auto hl = hardy_littlewood(one, axes);
  for (const auto& z : hl.values()) CHECK(z.real() == doctest::Approx(1.0));
  const auto st = strong_maximal(one, axes);
  for (const auto& z : st.values()) CHECK(z.real() == doctest::Approx(1.0));
}

TEST_CASE("adding directions never decreases the output") {
  const auto f = random_band_limited_field(2, 32, 8.0, 5, 2);
  const auto net = build_maximal_net(2, 0.3, 1);
  DirectionSet half{2, {}, net.separation, std::nullopt};
  for (std::size_t i = 0; i < net.size(); i += 2) half.points.push_back(net.points[i]);
  const auto scales = ScaleGrid::geometric(0.5, 8.0);
  const auto small = maximal_average(f, half, scales);
  const auto big = maximal_average(f, net, scales);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(big.output[i].real() >= small.output[i].real());
  const auto hs = maximal_singular(f, half, MultiplierSpec::hilbert());
  const auto hb = maximal_singular(f, net, MultiplierSpec::hilbert());
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(hb.output[i].real() >= hs.output[i].real());
  // Every direction is dominated by the sup.
  for (std::size_t d = 0; d < net.size(); d += 3) {
    const auto t = directional_singular(f, net.points[d], MultiplierSpec::hilbert());
    for (std::size_t i = 0; i < f.size(); i += 7) CHECK(hb.output[i].real() >= std::abs(t[i]) * (1.0 - 1e-14));
  }
}

TEST_CASE("single direction with the identity symbol is the modulus") {
  const auto f = random_band_limited_field(3, 16, 6.0, 4, 3);
  const DirectionSet single{3, {Direction::axis(3, 0)}, 2.0, std::nullopt};
  const auto r = maximal_singular(f, single, MultiplierSpec::identity());
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(r.output[i].real() == doctest::Approx(std::abs(f[i])).epsilon(1e-10));
  CHECK(r.l2_ratio == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("trivial bound for singular maximal functions") {
  const auto f = random_band_limited_field(2, 64, 10.0, 12, 5);
  for (double d : {0.8, 0.4, 0.2}) {
    const auto net = build_maximal_net(2, d, 1);
    for (const auto& m : {MultiplierSpec::hilbert(), MultiplierSpec::imaginary_power(1.0)}) {
      const auto r = maximal_singular(f, net, m);
      CHECK(r.l2_ratio <= std::sqrt(static_cast<double>(net.size())) * m.sup_norm);
    }
  }
}

TEST_CASE("sharp unit averages are dominated by smooth ones") {
  const auto f = positive_field(2, 64, 8.0, 6);
  const auto net = build_maximal_net(2, 0.6, 2);
  const auto single = single_scale_maximal(f, net);
  const auto avg = maximal_average(f, net, ScaleGrid::geometric(0.5, 8.0));
  const double lb = default_phi().lower_bound_const();
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(single.output[i].real() <= avg.output[i].real() / lb);
  GridField tiny(2, 8, 0.5);
  CHECK_THROWS_AS(single_scale_maximal(tiny, net), std::invalid_argument);
}

TEST_CASE("Nikodym with unit eccentricity is comparable to Hardy-Littlewood") {
  const auto f = positive_field(2, 64, 16.0, 7);
  const int axes[2] = {0, 1};
  const auto hl = hardy_littlewood(f, axes);
  const auto nk = nikodym_maximal(f, Direction::axis(2, 1), 1.0, ScaleGrid::for_grid(f));
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(nk[i].real() <= 4.0 * hl[i].real());
    CHECK(hl[i].real() <= 4.0 * nk[i].real());
  }
  CHECK_THROWS_AS(nikodym_maximal(f, Direction::axis(2, 0), 0.5, ScaleGrid::for_grid(f)), std::invalid_argument);
  CHECK_THROWS_AS(nikodym_maximal(f, Direction::axis(2, 1), 0.0, ScaleGrid::for_grid(f)), std::invalid_argument);
}

TEST_CASE("Hardy-Littlewood of a point mass") {
  const int n = 32;
  GridField f(2, n, 1.0);
  f[0] = 1.0;
  const int axes[2] = {0, 1};
  const auto hl = hardy_littlewood(f, axes);
  // Brute force over centered boxes of radius 0, 1, 2, ..., 16; the last one
  // wraps, so a point at offset 16 lies in it twice.
  const auto hits = [&](int offset, int r) {
    int c = 0;
    for (int j = -r; j <= r; ++j) c += ((j % n) + n) % n == offset;
    return c;
  };
  std::vector<int> m(2);
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    f.multi_index(idx, m);
    double expect = 0.0;
    for (int r : {0, 1, 2, 4, 8, 16})
      expect = std::max(expect, hits(m[0], r) * hits(m[1], r) / ((2.0 * r + 1) * (2.0 * r + 1)));
    CHECK(expect > 0.0);
    CHECK(hl[idx].real() == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("strong maximal dominates single-axis maximal functions") {
  const auto f = random_band_limited_field(3, 16, 6.0, 5, 8);
  const int axes[3] = {0, 1, 2};
  const auto s = strong_maximal(f, axes);
  for (int ax = 0; ax < 3; ++ax) {
    const auto one = hardy_littlewood(f, std::span<const int>(&ax, 1));
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(s[i].real() >= one[i].real() * (1.0 - 1e-12));
  }
  CHECK_THROWS_AS(hardy_littlewood(f, std::span<const int>()), std::invalid_argument);
}

TEST_CASE("ball oracles at reference points") {
  const auto v = Direction::normalized({0.2, -0.4, 0.9});
  const double origin[3] = {0.0, 0.0, 0.0};
  CHECK(ball_oracle_average(origin, v) == doctest::Approx(1.0));
  CHECK(ball_oracle_hilbert(origin, v) == doctest::Approx(0.0));
  double two_v[3];
  for (int i = 0; i < 3; ++i) two_v[i] = 2.0 * v[i];
  CHECK(ball_oracle_average(two_v, v) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(brute_average(two_v, v) == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
  CHECK(ball_oracle_hilbert(two_v, v) == doctest::Approx(std::log(3.0) / kPi).epsilon(1e-12));
  CHECK(brute_hilbert(two_v, v) == doctest::Approx(0.3496991).epsilon(1e-6));
  // Orthogonal offset of length 2: the line misses the ball.
  const auto w = orthogonal_component(Direction::axis(3, 0), v);
  double miss[3];
  for (int i = 0; i < 3; ++i) miss[i] = 2.0 * w[i];
  CHECK(ball_oracle_average(miss, v) == 0.0);
  CHECK(ball_oracle_hilbert(miss, v) == 0.0);
}

TEST_CASE("ball oracles agree with brute force") {
  const auto v = Direction::normalized({1.0, 2.0, -0.5});
  Engine eng = make_engine(3);
  for (int trial = 0; trial < 40; ++trial) {
    double x[3];
    for (double& c : x) c = 6.0 * uniform01(eng) - 3.0;
    if (trial < 10)
      for (double& c : x) c *= 0.3;
    CHECK(ball_oracle_average(x, v) == doctest::Approx(brute_average(x, v)).epsilon(1e-4));
    CHECK(std::abs(ball_oracle_hilbert(x, v) - brute_hilbert(x, v)) <= 1e-8);
  }
}

TEST_CASE("sharpness scan with a single direction does not grow") {
  SharpnessOptions opts;
  opts.single_direction = true;
  opts.radial_nodes = 24;
  const auto rep = sharpness_scan(3, {0.4, 0.3, 0.2, 0.15}, {1}, opts);
  REQUIRE(rep.points.size() == 4);
  // Adaptive cylinder quadrature of the closed forms over |x| < 1/delta.
  // Ratios rise only through the convergent 1/|x| tail, toward sqrt(3/2) and
  // 1, so the fitted slopes stay small without being zero.
  const double avg[4] = {1.12555, 1.14710, 1.17038, 1.18286};
  const double hil[4] = {0.93365, 0.95189, 0.96872, 0.97677};
  for (int i = 0; i < 4; ++i) {
    CHECK(rep.points[i].ratio_average == doctest::Approx(avg[i]).epsilon(0.01));
    CHECK(rep.points[i].ratio_hilbert == doctest::Approx(hil[i]).epsilon(0.01));
    CHECK(rep.points[i].ratio_average <= std::sqrt(1.5));
    CHECK(rep.points[i].ratio_hilbert <= 1.0);
  }
  CHECK(rep.fit_average.slope == doctest::Approx(0.0259).epsilon(0.1));
  CHECK(rep.fit_hilbert.slope == doctest::Approx(0.0234).epsilon(0.1));
  CHECK_THROWS_AS(sharpness_scan(2, {0.4, 0.3, 0.2}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(sharpness_scan(3, {1.4, 0.3, 0.2}, {1}), std::invalid_argument);
}

TEST_CASE("refining the scale grid barely changes the maximal average") {
  const auto f = random_band_limited_field(2, 64, 16.0, 6, 9);
  const auto net = build_maximal_net(2, 0.4, 3);
  const auto scales = ScaleGrid::for_grid(f);
  const auto a = maximal_average(f, net, scales).output;
  const auto b = maximal_average(f, net, scales.refined()).output;
  CHECK((b - a).l2_norm() <= 0.1 * a.l2_norm());
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(b[i].real() >= a[i].real() * (1.0 - 1e-12));
}

TEST_CASE("results do not depend on the thread count") {
  const auto f = random_band_limited_field(2, 32, 8.0, 5, 10);
  const auto net = build_maximal_net(2, 0.3, 4);
  const int saved = thread_count();
  set_thread_count(1);
  const auto a = maximal_average(f, net, ScaleGrid::for_grid(f));
  set_thread_count(3);
  const auto b = maximal_average(f, net, ScaleGrid::for_grid(f));
  set_thread_count(saved);
  CHECK(a.output.values() == b.output.values());
  CHECK(a.argmax_direction == b.argmax_direction);
  CHECK(a.argmax_scale == b.argmax_scale);
}

TEST_CASE("domination terms are well formed") {
  const auto f = random_band_limited_field(3, 16, 8.0, 4, 11);
  const auto scales = ScaleGrid::for_grid(f);
  const auto en = Direction::axis(3, 2);
  for (auto kind : {Domination::NikodymByDirectional, Domination::LowPassByNikodym, Domination::HighPassByCone,
                    Domination::DirectionalByPieces}) {
    const auto t = domination_terms(kind, f, en, 0.25, scales);
    const double c = domination_constant(t, 1e-9);
    CHECK(std::isfinite(c));
    CHECK(domination_violations(t, c, 1e-9) == 0);
    CHECK(domination_violations(t, c * 0.5, 1e-9) > 0);
  }
  const auto tilted = Direction::normalized({0.1, 0.0, 1.0});
  CHECK_NOTHROW(domination_terms(Domination::DirectionalByPieces, f, tilted, 0.25, scales));
  CHECK_THROWS_AS(domination_terms(Domination::NikodymByDirectional, f, tilted, 0.25, scales), std::invalid_argument);
  CHECK_THROWS_AS(domination_terms(Domination::DirectionalByPieces, f, Direction::axis(3, 0), 0.25, scales),
                  std::invalid_argument);
}

TEST_CASE("empty direction sets are rejected") {
  const auto f = random_band_limited_field(2, 16, 4.0, 3, 1);
  const DirectionSet empty{2, {}, 1.0, std::nullopt};
  CHECK_THROWS_AS(maximal_average(f, empty, ScaleGrid::for_grid(f)), std::invalid_argument);
  CHECK_THROWS_AS(maximal_singular(f, empty, MultiplierSpec::hilbert()), std::invalid_argument);
}

}  // TEST_SUITE
