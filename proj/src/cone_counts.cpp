#include "dirmax/cone_counts.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dirmax/error.hpp"
#include "dirmax/parallel.hpp"
#include "dirmax/sphere_nets.hpp"
#include "spatial_hash.hpp"

namespace dirmax {

std::vector<std::vector<int>> CapCover::caps() const {
  std::vector<std::vector<int>> out(centers.size());
  for (std::size_t i = 0; i < membership.size(); ++i) out[static_cast<std::size_t>(membership[i])].push_back(static_cast<int>(i));
  return out;
}

DirectionSet CapCover::center_set(int dim, double separation) const {
  DirectionSet s;
  s.dim = dim;
  s.points = centers;
  s.separation = separation;
  return s;
}

bool validate_cover(const CapCover& cover, const DirectionSet& omega, bool centers_in_set) {
  if (cover.membership.size() != omega.size() || cover.diameters.size() != cover.centers.size()) return false;
  if (!(cover.slack_c > 0.0 && cover.slack_c <= 1.0)) return false;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const int j = cover.membership[i];
    if (j < 0 || static_cast<std::size_t>(j) >= cover.centers.size()) return false;
    const auto ju = static_cast<std::size_t>(j);
    if (distance(omega.points[i], cover.centers[ju]) > cover.diameters[ju] * (1.0 + kSeparationRelTol)) return false;
  }
  if (centers_in_set) {
    for (const auto& c : cover.centers)
      if (std::none_of(omega.points.begin(), omega.points.end(), [&](const Direction& p) { return p == c; })) return false;
  }
  return true;
}

double dist_to_hyperplane(const Direction& v, const Direction& w) { return std::abs(dot(v, w)); }

double level_threshold(double delta_j, double c, int l) { return std::ldexp((1.0 + c) * delta_j, l); }

int saturation_level(double delta_j, double c) {
  int l = 0;
  while (level_threshold(delta_j, c, l) < 1.0) ++l;
  return l;
}

int saturation_level(const CapCover& cover) {
  int l = 0;
  for (double d : cover.diameters) l = std::max(l, saturation_level(d, cover.slack_c));
  return l;
}

int count_at(const Direction& w, const CapCover& cover, int l) {
  if (l < 0) throw std::invalid_argument("level must be non-negative");
  int n = 0;
  for (std::size_t j = 0; j < cover.centers.size(); ++j)
    if (std::abs(dot(cover.centers[j], w)) <= level_threshold(cover.diameters[j], cover.slack_c, l)) ++n;
  return n;
}

double default_resolution(const CapCover& cover) {
  double m = INFINITY;
  for (double d : cover.diameters) m = std::min(m, d);
  return m / 16.0;
}

namespace {

// First level l in [0, cap] with t <= base * 2^l + slack; cap + 1 when none.
inline int first_level(double t, double base, double slack, int cap) {
  const double q = (t - slack) / base;
  int l = 0;
  if (q > 1.0) {
    int e = 0;
    const double m = std::frexp(q, &e);
    l = (m == 0.5) ? e - 1 : e;
  }
  if (l > cap + 1) return cap + 1;
  while (l > 0 && t <= std::ldexp(base, l - 1) + slack) --l;
  while (l <= cap && t > std::ldexp(base, l) + slack) ++l;
  return l;
}

struct LevelBest {
  int lower = -1;
  std::size_t witness = 0;
  int upper = -1;
};

Direction sample_direction(const std::vector<double>& samples, std::size_t idx, int dim) {
  return Direction::normalized({samples.begin() + static_cast<std::ptrdiff_t>(idx * dim),
                                samples.begin() + static_cast<std::ptrdiff_t>((idx + 1) * dim)});
}

// Tries to raise the count at level l by rotating w, inside span(w, v), just
// far enough to bring one of the nearest uncounted centers v under its threshold.
// Each rotation range is searched by golden section; the count is recomputed
// exactly for every trial.
std::pair<int, Direction> refine(const CapCover& cover, int l, const Direction& w, int count, double radius) {
  const int dim = w.dim();
  struct Cand {
    double excess;
    std::size_t j;
  };
  std::vector<Cand> cands;
  for (std::size_t j = 0; j < cover.centers.size(); ++j) {
    const double thr = level_threshold(cover.diameters[j], cover.slack_c, l);
    const double t = std::abs(dot(cover.centers[j], w));
    if (t > thr && t - thr <= 2.0 * radius) cands.push_back({t - thr, j});
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    return a.excess < b.excess || (a.excess == b.excess && a.j < b.j);
  });
  if (cands.size() > 6) cands.resize(6);

  int best = count;
  Direction best_w = w;
  for (const auto& cand : cands) {
    const Direction& v = cover.centers[cand.j];
    const double a = dot(v, w);
    const double sgn = a >= 0 ? 1.0 : -1.0;
    std::vector<double> u(static_cast<std::size_t>(dim));
    double un = 0.0;
    for (int i = 0; i < dim; ++i) {
      u[i] = sgn * (v[i] - a * w[i]);
      un += u[i] * u[i];
    }
    un = std::sqrt(un);
    if (un < 1e-14) continue;
    for (double& x : u) x /= un;
    // |v . w(alpha)| = |cos(alpha + beta)| for w(alpha) = cos(alpha) w + sin(alpha) u.
    const double beta = std::acos(std::min(1.0, std::abs(a)));
    const double thr = level_threshold(cover.diameters[cand.j], cover.slack_c, l);
    const double lo = std::acos(std::min(1.0, thr)) - beta;
    const double hi = std::min(lo + 2.0 * radius, std::numbers::pi - std::acos(std::min(1.0, thr)) - beta);
    if (!(hi >= lo)) continue;
    auto at = [&](double alpha) {
      std::vector<double> c(static_cast<std::size_t>(dim));
      for (int i = 0; i < dim; ++i) c[i] = std::cos(alpha) * w[i] + std::sin(alpha) * u[i];
      Direction d = Direction::normalized(std::move(c));
      return std::make_pair(count_at(d, cover, l), d);
    };
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x0 = lo, x1 = hi;
    double xa = x1 - g * (x1 - x0), xb = x0 + g * (x1 - x0);
    auto fa = at(xa), fb = at(xb);
    for (auto* f : {&fa, &fb})
      if (f->first > best) {
        best = f->first;
        best_w = f->second;
      }
    for (int it = 0; it < 24; ++it) {
      if (fa.first >= fb.first) {
        x1 = xb;
        xb = xa;
        fb = fa;
        xa = x1 - g * (x1 - x0);
        fa = at(xa);
        if (fa.first > best) {
          best = fa.first;
          best_w = fa.second;
        }
      } else {
        x0 = xa;
        xa = xb;
        fa = fb;
        xb = x0 + g * (x1 - x0);
        fb = at(xb);
        if (fb.first > best) {
          best = fb.first;
          best_w = fb.second;
        }
      }
    }
  }
  return {best, best_w};
}

}  // namespace

std::vector<ElBracket> bracket_El_range(const CapCover& cover, int l_max, double resolution,
                                        const BracketOptions& opts) {
  if (l_max < 0) throw std::invalid_argument("level must be non-negative");
  if (!(resolution > 0.0)) throw std::invalid_argument("sample resolution must be positive");
  if (cover.centers.empty()) throw std::invalid_argument("cover has no caps");
  const int dim = cover.centers.front().dim();
  const std::size_t caps = cover.centers.size();

  const auto samples = covering_grid(dim, resolution, true, opts.max_samples);
  const std::size_t n_samples = samples.size() / static_cast<std::size_t>(dim);

  std::vector<double> centers;
  centers.reserve(caps * static_cast<std::size_t>(dim));
  for (const auto& v : cover.centers) centers.insert(centers.end(), v.coords().begin(), v.coords().end());
  std::vector<double> base(caps);
  for (std::size_t j = 0; j < caps; ++j) base[j] = (1.0 + cover.slack_c) * cover.diameters[j];

  const auto workers = static_cast<std::size_t>(std::max(1, thread_count()));
  const std::size_t chunk = (n_samples + workers - 1) / workers;
  std::vector<std::vector<LevelBest>> partial(workers, std::vector<LevelBest>(static_cast<std::size_t>(l_max + 1)));
  parallel_chunks(n_samples, [&](std::size_t b, std::size_t e) {
    auto& best = partial[chunk ? b / chunk : 0];
    std::vector<int> hist(static_cast<std::size_t>(l_max + 2)), hist_up(static_cast<std::size_t>(l_max + 2));
    for (std::size_t s = b; s < e; ++s) {
      const double* w = &samples[s * dim];
      std::fill(hist.begin(), hist.end(), 0);
      std::fill(hist_up.begin(), hist_up.end(), 0);
      for (std::size_t j = 0; j < caps; ++j) {
        const double* v = &centers[j * dim];
        double t = 0.0;
        for (int i = 0; i < dim; ++i) t += v[i] * w[i];
        t = std::abs(t);
        ++hist[static_cast<std::size_t>(first_level(t, base[j], 0.0, l_max))];
        ++hist_up[static_cast<std::size_t>(first_level(t, base[j], resolution, l_max))];
      }
      int lo = 0, up = 0;
      for (int l = 0; l <= l_max; ++l) {
        lo += hist[static_cast<std::size_t>(l)];
        up += hist_up[static_cast<std::size_t>(l)];
        auto& bl = best[static_cast<std::size_t>(l)];
        if (lo > bl.lower) {
          bl.lower = lo;
          bl.witness = s;
        }
        bl.upper = std::max(bl.upper, up);
      }
    }
  });

  std::vector<ElBracket> out;
  for (int l = 0; l <= l_max; ++l) {
    LevelBest agg;
    for (const auto& p : partial) {
      const auto& b = p[static_cast<std::size_t>(l)];
      if (b.lower > agg.lower) {
        agg.lower = b.lower;
        agg.witness = b.witness;
      }
      agg.upper = std::max(agg.upper, b.upper);
    }
    ElBracket br;
    br.l = l;
    br.sample_resolution = resolution;
    br.witness_w = sample_direction(samples, agg.witness, dim);
    br.lower = count_at(br.witness_w, cover, l);
    br.upper = agg.upper;
    if (opts.refine) {
      auto [c, w] = refine(cover, l, br.witness_w, br.lower, resolution);
      if (c > br.lower) {
        br.lower = c;
        br.witness_w = w;
      }
    }
    if (br.lower > br.upper) throw NumericError("bracket inversion: realized count exceeds the slackened maximum");
    out.push_back(std::move(br));
  }
  return out;
}

ElBracket bracket_El(const CapCover& cover, int l, double resolution, const BracketOptions& opts) {
  auto all = bracket_El_range(cover, l, resolution, opts);
  return all.back();
}

CapCover build_cap_cover(const DirectionSet& omega, double scale, double c) {
  if (omega.empty()) throw std::invalid_argument("cannot cover an empty direction set");
  if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("slack constant must lie in (0, 1]");
  if (!(scale >= omega.separation * (1.0 - kSeparationRelTol))) throw std::invalid_argument("cover scale must be at least the set separation");
  const int dim = omega.dim;
  const auto flat = omega.flat();
  const double sep2 = std::pow(scale * (1.0 - kSeparationRelTol), 2);

  CapCover cover;
  cover.slack_c = c;
  std::vector<std::size_t> center_idx;
  detail::SpatialHash hash(dim, std::min(scale, 2.0));
  auto d2 = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double t = flat[a * dim + k] - flat[b * dim + k];
      s += t * t;
    }
    return s;
  };
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const bool blocked = hash.any_near({&flat[i * dim], static_cast<std::size_t>(dim)}, [&](int id) {
      return d2(i, center_idx[static_cast<std::size_t>(id)]) < sep2;
    });
    if (blocked) continue;
    hash.insert(static_cast<int>(center_idx.size()), {&flat[i * dim], static_cast<std::size_t>(dim)});
    center_idx.push_back(i);
  }

  cover.membership.resize(omega.size());
  const double lim2 = std::pow(scale * (1.0 + kSeparationRelTol), 2);
  for (std::size_t i = 0; i < omega.size(); ++i) {
    int best = -1;
    double best_d2 = INFINITY;
    hash.any_near({&flat[i * dim], static_cast<std::size_t>(dim)}, [&](int id) {
      const double d = d2(i, center_idx[static_cast<std::size_t>(id)]);
      if (d < best_d2 || (d == best_d2 && id < best)) {
        best_d2 = d;
        best = id;
      }
      return false;
    });
    if (best < 0 || best_d2 > lim2) throw NumericError("cover construction left a point without a center within scale");
    cover.membership[i] = best;
  }
  for (std::size_t idx : center_idx) {
    cover.centers.push_back(omega.points[idx]);
    cover.diameters.push_back(scale);
  }
  return cover;
}

}  // namespace dirmax
