#include "dirmax/sphere_nets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dirmax/error.hpp"
#include "spatial_hash.hpp"

namespace dirmax {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMaxFillGrid = 20'000'000;

// Surface measure of S^{dim-1}.
double sphere_area(int dim) { return 2.0 * std::pow(kPi, dim / 2.0) / std::tgamma(dim / 2.0); }

// Volume of the unit ball in R^m.
double ball_volume(int m) { return std::pow(kPi, m / 2.0) / std::tgamma(m / 2.0 + 1.0); }

void uniform_point(int dim, Engine& eng, double* out) {
  while (true) {
    double n2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      out[i] = 2.0 * uniform01(eng) - 1.0;
      n2 += out[i] * out[i];
    }
    if (n2 > 1e-4 && n2 <= 1.0) {
      const double inv = 1.0 / std::sqrt(n2);
      for (int i = 0; i < dim; ++i) out[i] *= inv;
      return;
    }
  }
}

void apply_rotation(const std::vector<double>& rot, int dim, const double* in, double* out) {
  for (int r = 0; r < dim; ++r) {
    double s = 0.0;
    for (int c = 0; c < dim; ++c) s += rot[static_cast<std::size_t>(r * dim + c)] * in[c];
    out[r] = s;
  }
}

// Greedy delta-separated insertion; accepted points are stored flat.
class GreedyNet {
 public:
  GreedyNet(int dim, double delta) : dim_(dim), delta_(delta), hash_(dim, delta * (1.0 + 1e-6)) {
    const double d = delta * (1.0 - kSeparationRelTol);
    min_d2_ = d * d;
  }

  bool offer(const double* p) {
    if (nearest2(p, min_d2_) < min_d2_) return false;
    const int id = static_cast<int>(count());
    flat_.insert(flat_.end(), p, p + dim_);
    hash_.insert(id, {p, static_cast<std::size_t>(dim_)});
    return true;
  }

  // Squared distance to the nearest stored point if it is below `limit2`
  // (which must not exceed the hash cell squared), else `limit2`.
  double nearest2(const double* p, double limit2, int* which = nullptr) const {
    double best = limit2;
    if (which) *which = -1;
    hash_.any_near({p, static_cast<std::size_t>(dim_)}, [&](int id) {
      const double d2 = dist2(point(id), p);
      if (d2 < best) {
        best = d2;
        if (which) *which = id;
      }
      return false;
    });
    return best;
  }

  // True when a stored point other than `skip_a` and `skip_b` lies within
  // sqrt(limit2) of p; limit2 must not exceed the hash cell squared.
  bool covered_except(const double* p, double limit2, std::size_t skip_a, std::size_t skip_b) const {
    return hash_.any_near({p, static_cast<std::size_t>(dim_)}, [&](int id) {
      const auto k = static_cast<std::size_t>(id);
      return k != skip_a && k != skip_b && dist2(point(k), p) <= limit2;
    });
  }

  double dist2(const double* a, const double* b) const {
    double d2 = 0.0;
    for (int i = 0; i < dim_; ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
    return d2;
  }

  const double* point(std::size_t i) const { return &flat_[i * static_cast<std::size_t>(dim_)]; }
  std::size_t count() const { return flat_.size() / static_cast<std::size_t>(dim_); }
  int dim() const { return dim_; }
  double delta() const { return delta_; }

  std::vector<Direction> directions() const {
    std::vector<Direction> out;
    out.reserve(count());
    for (std::size_t i = 0; i < count(); ++i)
      out.push_back(Direction::normalized({flat_.begin() + i * dim_, flat_.begin() + (i + 1) * dim_}));
    return out;
  }

 private:
  int dim_;
  double delta_;
  detail::SpatialHash hash_;
  double min_d2_;
  std::vector<double> flat_;
};

// Closes every hole of a net on S^2. Closed caps of a common chord radius
// cover the sphere iff each intersection point of two cap boundaries lies in a
// third cap; an uncovered intersection point is at distance >= delta from the
// whole net and is inserted. Points are processed in insertion order, so new
// intersection points are checked too.
void fill_holes_s2(GreedyNet& net) {
  const double delta = net.delta();
  // Caps are widened by a relative 1e-9 so an inserted intersection point
  // clears the separation test despite rounding.
  const double radius = delta * (1.0 + 1e-9);
  const double kappa = 1.0 - radius * radius / 2.0;  // p . a for |p - a| = radius
  const double cover2 = radius * radius;
  detail::SpatialHash pairs(3, 2.0 * delta);
  std::size_t indexed = 0;
  for (std::size_t i = 0; i < net.count(); ++i) {
    while (indexed < net.count()) {
      pairs.insert(static_cast<int>(indexed), {net.point(indexed), 3});
      ++indexed;
    }
    // Copies: offer() may reallocate the point storage.
    const double a[3] = {net.point(i)[0], net.point(i)[1], net.point(i)[2]};
    std::vector<int> partners;
    pairs.any_near({a, 3}, [&](int j) {
      if (static_cast<std::size_t>(j) != i && net.dist2(net.point(j), a) < 4.0 * delta * delta) partners.push_back(j);
      return false;
    });
    std::sort(partners.begin(), partners.end());
    for (int j : partners) {
      const double b[3] = {net.point(j)[0], net.point(j)[1], net.point(j)[2]};
      const double g = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
      const double alpha = kappa / (1.0 + g);
      const double beta2 = (1.0 - 2.0 * alpha * alpha * (1.0 + g)) / (1.0 - g * g);
      if (!(beta2 > 0.0)) continue;
      const double beta = std::sqrt(beta2);
      const double cx[3] = {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
      for (double sign : {1.0, -1.0}) {
        double p[3];
        for (int k = 0; k < 3; ++k) p[k] = alpha * (a[k] + b[k]) + sign * beta * cx[k];
        const double inv = 1.0 / std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        for (double& x : p) x *= inv;
        if (!net.covered_except(p, cover2, i, static_cast<std::size_t>(j))) net.offer(p);
      }
    }
  }
}

// Moves x along the sphere away from its nearest net point while that
// distance grows, offering the end point; x is overwritten.
void climb_into_hole(GreedyNet& net, std::vector<double>& x, double step) {
  const int dim = net.dim();
  const double cover2 = net.delta() * net.delta();
  std::vector<double> u(static_cast<std::size_t>(dim)), y(static_cast<std::size_t>(dim));
  int nearest = -1;
  double d2 = net.nearest2(x.data(), cover2, &nearest);
  for (int iter = 0; iter < 40 && nearest >= 0 && step > 1e-6 * net.delta(); ++iter) {
    const double* c = net.point(static_cast<std::size_t>(nearest));
    double xc = 0.0;
    for (int k = 0; k < dim; ++k) xc += x[k] * c[k];
    double un = 0.0;
    for (int k = 0; k < dim; ++k) {
      u[k] = -(c[k] - xc * x[k]);  // tangent direction away from c
      un += u[k] * u[k];
    }
    if (!(un > 0.0)) break;
    double yn = 0.0;
    for (int k = 0; k < dim; ++k) {
      y[k] = x[k] + step * u[k] / std::sqrt(un);
      yn += y[k] * y[k];
    }
    for (double& v : y) v /= std::sqrt(yn);
    int next = -1;
    const double e2 = net.nearest2(y.data(), cover2, &next);
    if (e2 > d2) {
      x.swap(y);
      d2 = e2;
      nearest = next;
    } else {
      step *= 0.5;
    }
  }
  net.offer(x.data());
}

}  // namespace

std::vector<double> random_rotation(int dim, Engine& eng) {
  // Gram-Schmidt on uniform directions.
  std::vector<double> rows;
  rows.reserve(static_cast<std::size_t>(dim * dim));
  std::vector<double> v(static_cast<std::size_t>(dim));
  while (static_cast<int>(rows.size()) < dim * dim) {
    uniform_point(dim, eng, v.data());
    const int k = static_cast<int>(rows.size()) / dim;
    for (int r = 0; r < k; ++r) {
      double p = 0.0;
      for (int i = 0; i < dim; ++i) p += rows[static_cast<std::size_t>(r * dim + i)] * v[i];
      for (int i = 0; i < dim; ++i) v[i] -= p * rows[static_cast<std::size_t>(r * dim + i)];
    }
    double n2 = 0.0;
    for (double x : v) n2 += x * x;
    if (n2 < 1e-6) continue;
    const double inv = 1.0 / std::sqrt(n2);
    for (double x : v) rows.push_back(x * inv);
  }
  return rows;
}

DirectionSet build_maximal_net(int dim, double delta, std::uint64_t seed) {
  if (dim < 2) throw std::invalid_argument("net dimension must be at least 2");
  if (!(delta > 0.0) || !(delta < 2.0)) throw std::invalid_argument("net separation must lie in (0, 2)");

  Engine eng = make_engine(seed, 0x6e6574);
  GreedyNet net(dim, delta);
  std::vector<double> p(static_cast<std::size_t>(dim));

  if (dim == 2) {
    // Coarse stream of K equal angles first, then the 8x refinement; the
    // refinement points all fall strictly inside gaps shorter than twice the
    // separation angle and are rejected, so the net is the regular K-gon.
    const double theta = 2.0 * std::asin(delta / 2.0);
    const int k = std::max(2, static_cast<int>(std::floor(2.0 * kPi / theta + 1e-9)));
    const double offset = 2.0 * kPi * uniform01(eng);
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < 8 * k; ++i) {
        if ((pass == 0) != (i % 8 == 0)) continue;
        const double a = offset + 2.0 * kPi * i / (8.0 * k);
        p[0] = std::cos(a);
        p[1] = std::sin(a);
        net.offer(p.data());
      }
    }
  } else if (dim == 3) {
    // A sparse spiral (hexagonal-equivalent spacing 1.45 delta, below the
    // covering-optimal sqrt(3) delta) seeds the net, exact hole filling makes
    // it maximal, and a fine spiral plus uniform points back the filling up.
    const auto rot = random_rotation(3, eng);
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    const double spacing = 1.45 * delta;
    const auto coarse = static_cast<std::size_t>(std::ceil(8.0 * kPi / (std::sqrt(3.0) * spacing * spacing)));
    const double res = delta / 8.0;
    const auto fine = static_cast<std::size_t>(std::ceil(4.0 * kPi / (res * res)));
    double q[3];
    auto spiral = [&](std::size_t m) {
      for (std::size_t i = 0; i < m; ++i) {
        const double z = -1.0 + (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(m);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double a = golden * static_cast<double>(i);
        q[0] = r * std::cos(a);
        q[1] = r * std::sin(a);
        q[2] = z;
        apply_rotation(rot, 3, q, p.data());
        net.offer(p.data());
      }
    };
    spiral(coarse);
    fill_holes_s2(net);
    spiral(fine);
    for (std::size_t i = 0; i < fine / 4; ++i) {
      uniform_point(3, eng, p.data());
      net.offer(p.data());
    }
  } else {
    // Budget proportional to the packing bound area(S^{n-1}) / vol(B^{n-1}(delta/2)).
    const double packing = sphere_area(dim) / (ball_volume(dim - 1) * std::pow(delta / 2.0, dim - 1));
    const auto budget = static_cast<std::size_t>(std::min(4.0e7, 24.0 * packing + 1000.0));
    for (std::size_t i = 0; i < budget; ++i) {
      uniform_point(dim, eng, p.data());
      net.offer(p.data());
    }
    // A rotated covering grid at delta/8 (coarser in high dimension) bounds
    // the width of any hole the budget left.
    // From each nearly uncovered grid point, a short climb away from the
    // nearest net point finds the bottom of any remaining hole.
    double res = delta / 8.0;
    while (res < delta / 2.0 && covering_grid_size(dim, res, false) > kMaxFillGrid) res *= 2.0;
    if (covering_grid_size(dim, res, false) <= kMaxFillGrid) {
      const auto rot = random_rotation(dim, eng);
      const auto grid = covering_grid(dim, res, false, kMaxFillGrid);
      const double near2 = (delta - res) * (delta - res);
      const double cover2 = delta * delta;
      for (std::size_t i = 0; i < grid.size(); i += static_cast<std::size_t>(dim)) {
        apply_rotation(rot, dim, &grid[i], p.data());
        if (net.offer(p.data()) || net.nearest2(p.data(), cover2) < near2) continue;
        climb_into_hole(net, p, res);
      }
    }
  }

  DirectionSet out;
  out.dim = dim;
  out.points = net.directions();
  out.separation = delta;
  return out;
}

void LacunarySpec::validate() const {
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("lacunary ratio must lie in (0, 1)");
  if (count < 1) throw std::invalid_argument("lacunary count must be positive");
  if (!(cap_radius > 0.0)) throw std::invalid_argument("lacunary cap radius must be positive");
  if (cap_center.dim() != tangent.dim()) throw std::invalid_argument("lacunary center/tangent dimension mismatch");
  if (std::abs(dot(cap_center, tangent)) > 1e-12) throw std::invalid_argument("lacunary tangent must be orthogonal to the center");
}

DirectionSet build_lacunary(const LacunarySpec& spec) {
  spec.validate();
  const int dim = spec.cap_center.dim();
  DirectionSet out;
  out.dim = dim;
  double step = spec.cap_radius;
  for (int k = 0; k < spec.count; ++k) {
    std::vector<double> c(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) c[i] = spec.cap_center[i] + step * spec.tangent[i];
    out.points.push_back(Direction::normalized(std::move(c)));
    step *= spec.ratio;
  }
  out.separation = out.size() > 1 ? min_pairwise_distance(out) : 2.0;
  out.diameter_bound = out.size() > 1 ? max_pairwise_distance(out) : 0.0;
  return out;
}

MixedSet build_mixed_set(int dim, double delta, const LacunaryTemplate& per_cap, std::uint64_t seed) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("mixed-set scale must lie in (0, 1)");
  if (!(per_cap.cap_radius < delta / 2.0)) throw std::invalid_argument("lacunary caps must have radius below delta/2");

  MixedSet out;
  out.centers = build_maximal_net(dim, delta, seed);
  out.omega.dim = dim;
  Engine eng = make_engine(seed, 0x6d69786564);
  std::vector<double> r(static_cast<std::size_t>(dim));
  for (std::size_t j = 0; j < out.centers.size(); ++j) {
    const Direction& center = out.centers.points[j];
    Direction tangent;
    while (true) {
      uniform_point(dim, eng, r.data());
      const Direction cand = Direction::normalized(r);
      if (std::abs(dot(cand, center)) < 0.9) {
        tangent = orthogonal_component(cand, center);
        break;
      }
    }
    const DirectionSet cap =
        build_lacunary({center, tangent, per_cap.ratio, per_cap.count, per_cap.cap_radius});
    for (const auto& p : cap.points) {
      out.omega.points.push_back(p);
      out.cover.membership.push_back(static_cast<int>(j));
    }
    out.cover.centers.push_back(center);
    out.cover.diameters.push_back(delta);
  }
  out.omega.separation = out.omega.size() > 1 ? min_pairwise_distance(out.omega) : 2.0;
  return out;
}

namespace {

// Covering grid on S^m in R^{m+1}: rows (cos t, sin t * u) with u drawn from
// a covering grid of S^{m-1} whose radius is scaled by the row's largest sin t.
std::size_t grid_count(int m, double radius, double t_max) {
  if (m == 1) return static_cast<std::size_t>(std::ceil(kPi / std::min(radius, kPi)));
  const int rows = std::max(1, static_cast<int>(std::ceil(t_max / radius)));
  const double h = t_max / rows;
  std::size_t total = 0;
  for (int i = 0; i < rows; ++i) {
    const double lo = i * h, hi = (i + 1) * h;
    const double smax = (lo <= kPi / 2 && hi >= kPi / 2) ? 1.0 : std::max(std::sin(lo), std::sin(hi));
    const double sub = smax <= 0.0 ? kPi : std::min(kPi, (radius / 2.0) / smax);
    total += sub >= kPi ? 1 : grid_count(m - 1, sub, kPi);
  }
  return total;
}

void grid_emit(int m, double radius, double t_max, std::vector<double>& out) {
  // Emits points of S^m, (m+1) coordinates each.
  if (m == 1) {
    const std::size_t k = grid_count(1, radius, kPi);
    for (std::size_t j = 0; j < k; ++j) {
      const double a = 2.0 * kPi * (static_cast<double>(j) + 0.5) / static_cast<double>(k);
      out.push_back(std::cos(a));
      out.push_back(std::sin(a));
    }
    return;
  }
  const int rows = std::max(1, static_cast<int>(std::ceil(t_max / radius)));
  const double h = t_max / rows;
  std::vector<double> sub_pts;
  for (int i = 0; i < rows; ++i) {
    const double lo = i * h, hi = (i + 1) * h;
    const double t = (i + 0.5) * h;
    const double smax = (lo <= kPi / 2 && hi >= kPi / 2) ? 1.0 : std::max(std::sin(lo), std::sin(hi));
    const double sub = smax <= 0.0 ? kPi : std::min(kPi, (radius / 2.0) / smax);
    sub_pts.clear();
    if (sub >= kPi) {
      sub_pts.assign(static_cast<std::size_t>(m), 0.0);
      sub_pts[0] = 1.0;
    } else {
      grid_emit(m - 1, sub, kPi, sub_pts);
    }
    const double c = std::cos(t), s = std::sin(t);
    for (std::size_t k = 0; k < sub_pts.size(); k += static_cast<std::size_t>(m)) {
      out.push_back(c);
      for (int d = 0; d < m; ++d) out.push_back(s * sub_pts[k + d]);
    }
  }
}

}  // namespace

std::size_t covering_grid_size(int dim, double radius, bool hemisphere) {
  if (dim < 2) throw std::invalid_argument("covering grid needs dim >= 2");
  if (!(radius > 0.0)) throw std::invalid_argument("covering radius must be positive");
  if (dim == 2) return grid_count(1, radius, kPi);
  return grid_count(dim - 1, radius, hemisphere ? kPi / 2 : kPi);
}

std::vector<double> covering_grid(int dim, double radius, bool hemisphere, std::size_t max_points) {
  const std::size_t n = covering_grid_size(dim, radius, hemisphere);
  if (n > max_points) throw NumericError("covering grid at the requested resolution exceeds the memory guard");
  std::vector<double> out;
  out.reserve(n * static_cast<std::size_t>(dim));
  if (dim == 2) {
    grid_emit(1, radius, kPi, out);
  } else {
    grid_emit(dim - 1, radius, hemisphere ? kPi / 2 : kPi, out);
  }
  return out;
}

double sampled_covering_radius(const DirectionSet& net, double resolution, std::uint64_t seed,
                               std::size_t max_samples) {
  if (net.empty()) return INFINITY;
  const int dim = net.dim;
  const auto flat = net.flat();
  const double cell = std::max(net.separation, 1e-3);
  detail::SpatialHash hash(dim, cell);
  for (std::size_t i = 0; i < net.size(); ++i)
    hash.insert(static_cast<int>(i), {&flat[i * dim], static_cast<std::size_t>(dim)});

  auto nearest = [&](const double* p) {
    double best = INFINITY;
    hash.any_near({p, static_cast<std::size_t>(dim)}, [&](int id) {
      double d2 = 0.0;
      for (int k = 0; k < dim; ++k) {
        const double t = flat[static_cast<std::size_t>(id) * dim + k] - p[k];
        d2 += t * t;
      }
      best = std::min(best, d2);
      return false;
    });
    if (best > cell * cell) {
      // Nothing within one cell; fall back to a full scan for the exact value.
      for (std::size_t i = 0; i < net.size(); ++i) {
        double d2 = 0.0;
        for (int k = 0; k < dim; ++k) {
          const double t = flat[i * dim + k] - p[k];
          d2 += t * t;
        }
        best = std::min(best, d2);
      }
    }
    return std::sqrt(best);
  };

  double worst = 0.0;
  if (dim <= 3) {
    Engine eng = make_engine(seed, 0x636f76);
    const auto rot = random_rotation(dim, eng);
    const auto grid = covering_grid(dim, resolution, false, max_samples);
    std::vector<double> p(static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < grid.size(); i += static_cast<std::size_t>(dim)) {
      apply_rotation(rot, dim, &grid[i], p.data());
      worst = std::max(worst, nearest(p.data()));
    }
  } else {
    Engine eng = make_engine(seed, 0x636f76);
    std::vector<double> p(static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < max_samples; ++i) {
      uniform_point(dim, eng, p.data());
      worst = std::max(worst, nearest(p.data()));
    }
  }
  return worst;
}

}  // namespace dirmax
