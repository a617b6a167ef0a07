#include "dirmax/maximal_ops.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "dirmax/error.hpp"
#include "dirmax/parallel.hpp"

namespace dirmax {

namespace {

std::vector<double> abs_values(const GridField& f) {
  std::vector<double> a(f.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(f[i]);
  return a;
}

GridField real_field(const GridField& like, const std::vector<double>& a) {
  GridField g(like.dim(), like.points_per_axis(), like.box_length());
  for (std::size_t i = 0; i < a.size(); ++i) g[i] = a[i];
  return g;
}

std::size_t axis_stride(int dim, int n, int axis) {
  std::size_t s = 1;
  for (int i = axis + 1; i < dim; ++i) s *= static_cast<std::size_t>(n);
  return s;
}

// Periodic centered moving average of window 2r+1 along one axis, in place.
// Windows longer than the period wrap and count points with multiplicity.
void box_1d(std::vector<double>& a, int dim, int n, int axis, int r) {
  if (r <= 0) return;
  const std::size_t stride = axis_stride(dim, n, axis);
  const std::size_t block = stride * static_cast<std::size_t>(n);
  const double w = 1.0 / (2.0 * r + 1.0);
  std::vector<double> prefix(n + 1);
  // Sum of line[j mod n] over integers j < k.
  const auto below = [&](long k) {
    const long q = k >= 0 ? k / n : -((-k + n - 1) / n);
    return static_cast<double>(q) * prefix[n] + prefix[k - q * n];
  };
  for (std::size_t outer = 0; outer < a.size(); outer += block) {
    for (std::size_t inner = 0; inner < stride; ++inner) {
      const std::size_t base = outer + inner;
      prefix[0] = 0.0;
      for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + a[base + i * stride];
      for (int i = 0; i < n; ++i) a[base + i * stride] = (below(i + r + 1) - below(i - r)) * w;
    }
  }
}

// Radii 0, 1, 2, 4, ... up to the first window that covers a whole period.
std::vector<int> dyadic_radii(int n) {
  std::vector<int> r{0};
  for (int v = 1;; v *= 2) {
    r.push_back(v);
    if (2 * v + 1 >= n) break;
  }
  return r;
}

int clamp_radius(double half_width, double dx, int n) {
  const int r = static_cast<int>(std::floor(half_width / dx + 1e-9));
  return std::clamp(r, 0, n / 2);
}

void require_axis_frame(const Direction& v) {
  if (distance(v, Direction::axis(v.dim(), v.dim() - 1)) > 1e-12)
    throw std::invalid_argument("Nikodym rectangles are only available for v = e_n");
}

void max_into(std::vector<double>& acc, const std::vector<double>& a) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = std::max(acc[i], a[i]);
}

// Shared sup loop: value(d, s) yields the field for direction d and scale s.
template <class ValueFn>
MaximalReport sup_report(const GridField& f, std::size_t directions, std::size_t scales, ValueFn&& value) {
  const std::size_t npts = f.size();
  struct Chunk {
    std::vector<double> out;
    std::vector<std::uint32_t> dir;
    std::vector<std::uint16_t> scale;
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(thread_count(), directions));
  std::vector<Chunk> chunks(workers);
  const std::size_t step = (directions + workers - 1) / workers;
  parallel_chunks(workers, [&](std::size_t wb, std::size_t we) {
    for (std::size_t w = wb; w < we; ++w) {
      Chunk& c = chunks[w];
      c.out.assign(npts, -1.0);
      c.dir.assign(npts, 0);
      c.scale.assign(npts, 0);
      for (std::size_t d = w * step; d < std::min(directions, (w + 1) * step); ++d) {
        for (std::size_t s = 0; s < scales; ++s) {
          const GridField g = value(d, s);
          for (std::size_t i = 0; i < npts; ++i) {
            const double a = std::abs(g[i]);
            if (a > c.out[i]) {
              c.out[i] = a;
              c.dir[i] = static_cast<std::uint32_t>(d);
              c.scale[i] = static_cast<std::uint16_t>(s);
            }
          }
        }
      }
    }
  });
  MaximalReport rep;
  rep.argmax_direction = std::move(chunks[0].dir);
  rep.argmax_scale = std::move(chunks[0].scale);
  std::vector<double> out = std::move(chunks[0].out);
  for (std::size_t w = 1; w < workers; ++w) {
    if (chunks[w].out.empty()) continue;
    for (std::size_t i = 0; i < npts; ++i) {
      if (chunks[w].out[i] > out[i]) {
        out[i] = chunks[w].out[i];
        rep.argmax_direction[i] = chunks[w].dir[i];
        rep.argmax_scale[i] = chunks[w].scale[i];
      }
    }
  }
  rep.output = real_field(f, out);
  const double in = f.l2_norm();
  rep.l2_ratio = in > 0.0 ? rep.output.l2_norm() / in : 0.0;
  return rep;
}

void check_omega(const GridField& f, const DirectionSet& omega) {
  if (omega.empty()) throw std::invalid_argument("direction set is empty");
  for (const auto& v : omega.points)
    if (v.dim() != f.dim()) throw std::invalid_argument("direction and field dimensions differ");
}

}  // namespace

ScaleGrid ScaleGrid::geometric(double lo, double hi, double ratio) {
  if (!(lo > 0.0) || !(hi >= lo) || !(ratio > 1.0) || !std::isfinite(hi))
    throw std::invalid_argument("scale grid needs 0 < lo <= hi and ratio > 1");
  ScaleGrid g;
  for (int i = 0;; ++i) {
    const double h = lo * std::pow(ratio, i);
    if (h > hi * (1.0 + 1e-12)) break;
    g.h_values.push_back(h);
  }
  return g;
}

ScaleGrid ScaleGrid::for_grid(const GridField& grid, double ratio) {
  return geometric(grid.spacing(), grid.box_length(), ratio);
}

void ScaleGrid::validate() const {
  if (h_values.empty()) throw std::invalid_argument("scale grid is empty");
  for (double h : h_values)
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("scales must be positive");
  if (h_values.size() < 2) return;
  const double ratio = h_values[1] / h_values[0];
  if (!(ratio > 1.0)) throw std::invalid_argument("scales must increase");
  for (std::size_t i = 1; i < h_values.size(); ++i)
    if (std::abs(h_values[i] / h_values[i - 1] - ratio) > 1e-12 * ratio)
      throw std::invalid_argument("scale ratio is not constant");
}

ScaleGrid ScaleGrid::refined() const {
  validate();
  if (h_values.size() < 2) return *this;
  const double ratio = h_values[1] / h_values[0];
  return geometric(h_values.front(), h_values.back(), std::sqrt(ratio));
}

MaximalReport maximal_average(const GridField& f, const DirectionSet& omega, const ScaleGrid& scales,
                              const BumpPhi& phi) {
  check_omega(f, omega);
  scales.validate();
  const Spectrum spec(f);
  MaximalReport rep = sup_report(f, omega.size(), scales.h_values.size(), [&](std::size_t d, std::size_t s) {
    return spec.apply(average_symbol(omega.points[d], scales.h_values[s], phi));
  });
  rep.operator_id = "average";
  return rep;
}

MaximalReport maximal_singular(const GridField& f, const DirectionSet& omega, const MultiplierSpec& m) {
  check_omega(f, omega);
  const Spectrum spec(f);
  MaximalReport rep = sup_report(f, omega.size(), 1, [&](std::size_t d, std::size_t) {
    return spec.apply(singular_symbol(omega.points[d], m));
  });
  rep.operator_id = "singular:" + m.name;
  return rep;
}

MaximalReport single_scale_maximal(const GridField& f, const DirectionSet& omega) {
  check_omega(f, omega);
  if (f.box_length() < 1.0) throw std::invalid_argument("single-scale maximal needs box length >= 1");
  const int n = f.dim();
  const int N = f.points_per_axis();
  const double dx = f.spacing();
  const std::vector<double> a = abs_values(f);
  const int steps = std::max(2, static_cast<int>(std::ceil(1.0 / dx)));
  const std::size_t corners = std::size_t{1} << n;
  std::vector<std::size_t> stride(n);
  for (int i = 0; i < n; ++i) stride[i] = axis_stride(n, N, i);

  MaximalReport rep = sup_report(f, omega.size(), 1, [&](std::size_t d, std::size_t) {
    const Direction& v = omega.points[d];
    GridField out(n, N, f.box_length());
    std::vector<int> m(n), base(n);
    std::vector<double> frac(n);
    for (std::size_t idx = 0; idx < f.size(); ++idx) {
      f.multi_index(idx, m);
      double sum = 0.0;
      for (int k = 0; k <= steps; ++k) {
        const double t = -0.5 + static_cast<double>(k) / steps;
        const double w = (k == 0 || k == steps) ? 0.5 : 1.0;
        // Multilinear interpolation of |f| at x - v t (grid units, periodic).
        for (int i = 0; i < n; ++i) {
          const double p = m[i] - v[i] * t / dx;
          const double fl = std::floor(p);
          frac[i] = p - fl;
          base[i] = static_cast<int>(((static_cast<long long>(fl) % N) + N) % N);
        }
        double val = 0.0;
        for (std::size_t c = 0; c < corners; ++c) {
          double wt = 1.0;
          std::size_t off = 0;
          for (int i = 0; i < n; ++i) {
            const bool up = (c >> i) & 1u;
            wt *= up ? frac[i] : 1.0 - frac[i];
            off += static_cast<std::size_t>(up ? (base[i] + 1) % N : base[i]) * stride[i];
          }
          if (wt != 0.0) val += wt * a[off];
        }
        sum += w * val;
      }
      out[idx] = sum / steps;
    }
    return out;
  });
  rep.operator_id = "single_scale";
  return rep;
}

GridField box_average(const GridField& f, std::span<const int> radius) {
  if (static_cast<int>(radius.size()) != f.dim()) throw std::invalid_argument("one radius per axis expected");
  std::vector<double> a = abs_values(f);
  for (int ax = 0; ax < f.dim(); ++ax) box_1d(a, f.dim(), f.points_per_axis(), ax, radius[ax]);
  return real_field(f, a);
}

GridField nikodym_maximal(const GridField& f, const Direction& v, double delta, const ScaleGrid& scales) {
  if (v.dim() != f.dim()) throw std::invalid_argument("direction and field dimensions differ");
  require_axis_frame(v);
  if (!(delta > 0.0) || delta > 1.0) throw std::invalid_argument("Nikodym eccentricity must lie in (0, 1]");
  scales.validate();
  const int n = f.dim(), N = f.points_per_axis();
  const double dx = f.spacing();
  std::set<std::pair<int, int>> shapes;
  for (double h : scales.h_values) shapes.insert({clamp_radius(delta * h / 2.0, dx, N), clamp_radius(h / 2.0, dx, N)});
  const std::vector<double> a = abs_values(f);
  std::vector<double> acc(a.size(), 0.0);
  for (const auto& [r_short, r_long] : shapes) {
    std::vector<double> b = a;
    for (int ax = 0; ax < n - 1; ++ax) box_1d(b, n, N, ax, r_short);
    box_1d(b, n, N, n - 1, r_long);
    max_into(acc, b);
  }
  return real_field(f, acc);
}

GridField hardy_littlewood(const GridField& f, std::span<const int> axes) {
  if (axes.empty()) throw std::invalid_argument("maximal function needs at least one axis");
  for (int ax : axes)
    if (ax < 0 || ax >= f.dim()) throw std::invalid_argument("axis out of range");
  const std::vector<double> a = abs_values(f);
  std::vector<double> acc(a.size(), 0.0);
  for (int r : dyadic_radii(f.points_per_axis())) {
    std::vector<double> b = a;
    for (int ax : axes) box_1d(b, f.dim(), f.points_per_axis(), ax, r);
    max_into(acc, b);
  }
  return real_field(f, acc);
}

GridField strong_maximal(const GridField& f, std::span<const int> axes) {
  if (axes.empty()) throw std::invalid_argument("maximal function needs at least one axis");
  GridField g = abs_field(f);
  for (int ax : axes) g = hardy_littlewood(g, std::span<const int>(&ax, 1));
  return g;
}

const char* domination_name(Domination kind) {
  switch (kind) {
    case Domination::NikodymByDirectional: return "nikodym_by_directional";
    case Domination::LowPassByNikodym: return "lowpass_by_nikodym";
    case Domination::HighPassByCone: return "highpass_by_cone";
    case Domination::DirectionalByPieces: return "directional_by_pieces";
  }
  return "unknown";
}

DominationTerms domination_terms(Domination kind, const GridField& f, const Direction& v, double delta,
                                 const ScaleGrid& scales) {
  const int n = f.dim();
  if (v.dim() != n) throw std::invalid_argument("direction and field dimensions differ");
  const Direction e_n = Direction::axis(n, n - 1);
  std::vector<int> transverse(n - 1), all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  for (int i = 0; i + 1 < n; ++i) transverse[i] = i;
  const DirectionSet single{n, {v}, 2.0, std::nullopt};
  auto directional = [&](const GridField& g) { return maximal_average(g, single, scales).output; };
  auto smoothed_sup = [&](bool high_pass) {
    const Spectrum spec(f);
    const auto& phi = default_phi();
    return sup_report(f, 1, scales.h_values.size(), [&](std::size_t, std::size_t s) {
      const double h = scales.h_values[s];
      return spec.apply([&](std::span<const double> xi) {
        const double cut = radial_cutoff(h * delta * std::sqrt(dot(xi, xi)));
        return Complex(phi.fourier(h * dot(v.coords(), xi)) * (high_pass ? 1.0 - cut : cut), 0.0);
      });
    }).output;
  };
  auto cone_part = [&](const Direction& center) {
    const GridField r = cone_restrict(f, ConeSpec{center, delta, 1.0, 0});
    return directional(hardy_littlewood(r, all));
  };

  switch (kind) {
    case Domination::NikodymByDirectional:
      require_axis_frame(v);
      return {nikodym_maximal(f, v, delta, scales), directional(hardy_littlewood(f, transverse))};
    case Domination::LowPassByNikodym:
      require_axis_frame(v);
      return {smoothed_sup(false), nikodym_maximal(f, v, delta, scales)};
    case Domination::HighPassByCone:
      require_axis_frame(v);
      return {smoothed_sup(true), cone_part(v)};
    case Domination::DirectionalByPieces: {
      if (distance(v, e_n) > delta * (1.0 + 1e-12)) throw std::invalid_argument("|v - e_n| exceeds delta");
      GridField rhs = nikodym_maximal(f, e_n, delta, scales) + cone_part(e_n);
      return {directional(f), rhs};
    }
  }
  throw std::invalid_argument("unknown domination kind");
}

double domination_constant(const DominationTerms& t, double atol) {
  if (!t.lhs.same_grid(t.rhs)) throw std::invalid_argument("domination terms live on different grids");
  double c = 0.0;
  for (std::size_t i = 0; i < t.lhs.size(); ++i) {
    const double l = t.lhs[i].real() - atol, r = t.rhs[i].real();
    if (l <= 0.0) continue;
    if (!(r > 0.0)) throw NumericError("dominating side vanishes where the dominated side does not");
    c = std::max(c, l / r);
  }
  return c;
}

std::size_t domination_violations(const DominationTerms& t, double constant, double atol) {
  if (!t.lhs.same_grid(t.rhs)) throw std::invalid_argument("domination terms live on different grids");
  std::size_t bad = 0;
  for (std::size_t i = 0; i < t.lhs.size(); ++i)
    if (t.lhs[i].real() > constant * t.rhs[i].real() + atol) ++bad;
  return bad;
}

}  // namespace dirmax
