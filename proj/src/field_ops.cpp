#include "dirmax/field_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dirmax/cone_counts.hpp"
#include "dirmax/error.hpp"
#include "dirmax/parallel.hpp"
#include "dirmax/quadrature.hpp"
#include "dirmax/rng.hpp"
#include "dirmax/sphere_nets.hpp"

namespace dirmax {

namespace {

constexpr double kPi = std::numbers::pi;

double norm(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void require_finite(const Complex& z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw NumericError("multiplier symbol returned a non-finite value");
}

// Orthonormal basis of the complement of v.
std::vector<std::vector<double>> complement_basis(const Direction& v) {
  const int n = v.dim();
  std::vector<std::vector<double>> basis;
  for (int a = 0; a < n && static_cast<int>(basis.size()) < n - 1; ++a) {
    std::vector<double> e(n, 0.0);
    e[a] = 1.0;
    const double pv = v[a];
    for (int i = 0; i < n; ++i) e[i] -= pv * v[i];
    for (const auto& b : basis) {
      const double p = dot(e, b);
      for (int i = 0; i < n; ++i) e[i] -= p * b[i];
    }
    const double len = norm(e);
    if (len < 1e-6) continue;
    for (double& x : e) x /= len;
    basis.push_back(std::move(e));
  }
  return basis;
}

}  // namespace

std::vector<Complex> multiplier_on_grid(const GridField& grid, const Symbol& symbol) {
  const int n = grid.dim();
  std::vector<Complex> out(grid.size());
  parallel_chunks(grid.size(), [&](std::size_t b, std::size_t e) {
    std::vector<double> xi(n), xc(n);
    for (std::size_t idx = b; idx < e; ++idx) {
      grid.frequency(idx, xi);
      Complex m;
      if (!grid.touches_nyquist(idx)) {
        m = symbol(xi);
      } else {
        const std::size_t conj = grid.conjugate_index(idx);
        if (conj == idx) {
          for (int i = 0; i < n; ++i) xc[i] = -xi[i];
          m = 0.5 * (symbol(xi) + symbol(xc));
        } else if (idx < conj) {
          m = symbol(xi);
        } else {
          grid.frequency(conj, xc);
          for (double& x : xc) x = -x;
          m = symbol(xc);
        }
      }
      require_finite(m);
      out[idx] = m;
    }
  });
  return out;
}

Spectrum::Spectrum(const GridField& f)
    : grid_(f.dim(), f.points_per_axis(), f.box_length()), data_(forward_dft(f)) {}

GridField Spectrum::apply_values(const std::vector<Complex>& multiplier) const {
  if (multiplier.size() != data_.size()) throw std::invalid_argument("multiplier size does not match the grid");
  std::vector<Complex> s(data_.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = data_[i] * multiplier[i];
  return inverse_dft(std::move(s), grid_);
}

GridField Spectrum::apply(const Symbol& symbol) const { return apply_values(multiplier_on_grid(grid_, symbol)); }

GridField apply_multiplier(const GridField& f, const Symbol& symbol) { return Spectrum(f).apply(symbol); }

MultiplierSpec MultiplierSpec::identity() {
  MultiplierSpec m;
  m.name = "identity";
  m.symbol = [](double) { return Complex(1.0, 0.0); };
  m.zero_value = 1.0;
  m.sup_norm = 1.0;
  m.derivative_bound = 0.0;
  return m;
}

MultiplierSpec MultiplierSpec::hilbert() {
  MultiplierSpec m;
  m.name = "hilbert";
  m.symbol = [](double s) { return Complex(0.0, s > 0 ? -1.0 : 1.0); };
  m.zero_value = 0.0;
  m.sup_norm = 1.0;
  m.derivative_bound = 0.0;
  m.odd = true;
  return m;
}

MultiplierSpec MultiplierSpec::imaginary_power(double alpha) {
  if (!std::isfinite(alpha)) throw std::invalid_argument("exponent must be finite");
  MultiplierSpec m;
  m.name = "imaginary_power";
  m.symbol = [alpha](double s) { return std::polar(1.0, alpha * std::log(std::abs(s))); };
  m.zero_value = 1.0;
  m.sup_norm = 1.0;
  m.derivative_bound = std::abs(alpha);
  return m;
}

MikhlinCheck check_mikhlin(const MultiplierSpec& m, double tolerance) {
  if (!m.symbol) throw std::invalid_argument("multiplier has no symbol");
  MikhlinCheck r;
  constexpr int kSamples = 241;
  constexpr double kStep = 1e-4;
  for (int i = 0; i < kSamples; ++i) {
    const double a = std::pow(10.0, -6.0 + 12.0 * i / (kSamples - 1));
    for (double s : {a, -a}) {
      const Complex v = m(s);
      require_finite(v);
      r.sampled_sup = std::max(r.sampled_sup, std::abs(v));
      const Complex d = m(s * (1.0 + kStep)) - m(s * (1.0 - kStep));
      r.sampled_c1 = std::max(r.sampled_c1, std::abs(d) / (2.0 * kStep));
    }
  }
  r.ok = r.sampled_sup <= m.sup_norm * (1.0 + tolerance) &&
         r.sampled_c1 <= m.derivative_bound * (1.0 + tolerance) + tolerance * kStep;
  return r;
}

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

namespace {
constexpr int kPhiTable = 4096;
}

BumpPhi::BumpPhi() {
  const double g2 = integrate([this](double s) { return bump(s) * bump(s); }, -0.5, 0.5, 16, 16);
  norm_ = 1.0 / std::sqrt(g2);
  table_.resize(kPhiTable + 1);
  for (int i = 0; i <= kPhiTable; ++i) {
    const double sigma = static_cast<double>(i) / kPhiTable;
    if (i == kPhiTable) {
      table_[i] = 0.0;
      continue;
    }
    const double v = integrate([&](double u) { return bump(u) * bump(sigma - u); }, sigma - 0.5, 0.5, 8, 16);
    table_[i] = norm_ * norm_ * v;
  }
  lower_bound_ = profile(1.0);
}

double BumpPhi::bump(double s) const {
  const double q = 1.0 - 4.0 * s * s;
  return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

double BumpPhi::profile(double t) const {
  const int panels = 16 + static_cast<int>(std::min(std::abs(t), 1e6) / 2.0);
  const double c = integrate([&](double s) { return bump(s) * std::cos(t * s); }, -0.5, 0.5, panels, 16);
  const double g = norm_ * c / (2.0 * kPi);
  return 2.0 * kPi * g * g;
}

double BumpPhi::fourier(double s) const {
  const double a = std::abs(s);
  if (!(a < 1.0)) return 0.0;
  // Four-point Lagrange interpolation; the table is extended evenly below 0 and by zeros above 1.
  const double pos = a * kPhiTable;
  const int i = std::min(static_cast<int>(pos), kPhiTable - 1);
  const double t = pos - i;
  auto at = [this](int j) {
    if (j < 0) j = -j;
    return j > kPhiTable ? 0.0 : table_[j];
  };
  const double p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
  return -t * (t - 1.0) * (t - 2.0) / 6.0 * p0 + (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0 * p1 -
         (t + 1.0) * t * (t - 2.0) / 2.0 * p2 + (t + 1.0) * t * (t - 1.0) / 6.0 * p3;
}

const BumpPhi& default_phi() {
  static const BumpPhi phi;
  return phi;
}

double radial_cutoff(double r) { return smooth_step(2.0 - r); }

double lp_profile(double r) {
  if (!(r > 0.0)) return 0.0;
  const double u = std::log2(r);
  return std::abs(u) < 1.0 ? smooth_step(1.0 - std::abs(u)) : 0.0;
}

double shell_bump(double t, double c) {
  const double a = std::abs(t);
  const double lo0 = 0.5 + 0.25 * c, lo1 = 0.5 * (1.0 + c);
  const double hi0 = 1.0 + c, hi1 = 1.0 + 1.25 * c;
  return smooth_step((a - lo0) / (lo1 - lo0)) * smooth_step((hi1 - a) / (hi1 - hi0));
}

void ConeSpec::validate() const {
  if (center.dim() < 2) throw std::invalid_argument("cone center must be a direction in dimension >= 2");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("cone delta must be positive");
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("cone slack c must be positive");
  if (l < 0) throw std::invalid_argument("cone level must be non-negative");
}

int ConeSpec::saturation() const { return saturation_level(delta, c); }

int shell_index(const Direction& center, double delta, double c, std::span<const double> xi) {
  const double r = norm(xi);
  if (r == 0.0) return 0;
  const double a = std::abs(dot(center.coords(), xi));
  const int sat = saturation_level(delta, c);
  int l = 0;
  while (l < sat && a > level_threshold(delta, c, l) * r) ++l;
  return l;
}

Symbol average_symbol(const Direction& v, double h, const BumpPhi& phi) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("average scale h must be positive");
  return [v, h, &phi](std::span<const double> xi) { return Complex(phi.fourier(h * dot(v.coords(), xi)), 0.0); };
}

Symbol singular_symbol(const Direction& v, const MultiplierSpec& m) {
  if (!m.symbol) throw std::invalid_argument("multiplier has no symbol");
  return [v, m](std::span<const double> xi) { return m(dot(v.coords(), xi)); };
}

Symbol cone_symbol(const ConeSpec& cone) {
  cone.validate();
  return [cone](std::span<const double> xi) {
    return Complex(shell_index(cone.center, cone.delta, cone.c, xi) == cone.l ? 1.0 : 0.0, 0.0);
  };
}

GridField directional_average(const GridField& f, const Direction& v, double h, const BumpPhi& phi) {
  if (v.dim() != f.dim()) throw std::invalid_argument("direction and field dimensions differ");
  return apply_multiplier(f, average_symbol(v, h, phi));
}

GridField directional_singular(const GridField& f, const Direction& v, const MultiplierSpec& m) {
  if (v.dim() != f.dim()) throw std::invalid_argument("direction and field dimensions differ");
  return apply_multiplier(f, singular_symbol(v, m));
}

GridField cone_restrict(const GridField& f, const ConeSpec& cone) {
  if (cone.center.dim() != f.dim()) throw std::invalid_argument("cone and field dimensions differ");
  return apply_multiplier(f, cone_symbol(cone));
}

std::pair<int, int> littlewood_paley_range(const GridField& grid) {
  const double lo = 2.0 * kPi / grid.box_length();
  const double hi = std::sqrt(static_cast<double>(grid.dim())) * kPi * grid.points_per_axis() / grid.box_length();
  int k_lo = static_cast<int>(std::floor(std::log2(lo))) - 2;
  while (std::ldexp(1.0, k_lo + 1) <= lo) ++k_lo;
  int k_hi = static_cast<int>(std::ceil(std::log2(hi))) + 2;
  while (std::ldexp(1.0, k_hi - 1) >= hi) --k_hi;
  return {k_lo, k_hi};
}

GridField littlewood_paley(const GridField& f, int k) {
  const auto [k_lo, k_hi] = littlewood_paley_range(f);
  if (k < k_lo || k > k_hi) throw std::invalid_argument("Littlewood-Paley annulus misses the grid frequencies");
  return apply_multiplier(f, [k](std::span<const double> xi) { return Complex(lp_profile(std::ldexp(norm(xi), -k)), 0.0); });
}

FrequencySample FrequencySample::log_spaced(double lo, double hi, int count, int polar, int azimuth) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw std::invalid_argument("bad frequency sample range");
  FrequencySample s;
  s.radii.clear();
  for (int i = 0; i < count; ++i)
    s.radii.push_back(count == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  s.polar_steps = polar;
  s.azimuth_steps = azimuth;
  return s;
}

double multiplier_difference_max(const Direction& v, const Direction& v_j, const MultiplierSpec& m,
                                 const ConeSpec& cone, const FrequencySample& sample) {
  cone.validate();
  const int n = v.dim();
  if (v_j.dim() != n || cone.center.dim() != n) throw std::invalid_argument("dimension mismatch");
  if (distance(cone.center, v_j) > 1e-12) throw std::invalid_argument("cone must be centered at v_j");
  if (distance(v, v_j) > cone.delta * (1.0 + 1e-12)) throw std::invalid_argument("|v - v_j| exceeds the cone delta");
  if (sample.polar_steps < 1 || sample.azimuth_steps < 1 || sample.radii.empty())
    throw std::invalid_argument("empty frequency sample");

  const int sat = cone.saturation();
  const double lo = cone.l == 0 ? 0.0 : level_threshold(cone.delta, cone.c, cone.l - 1);
  const double hi = cone.l >= sat ? 1.0 : level_threshold(cone.delta, cone.c, cone.l);
  if (cone.l > sat || lo >= 1.0) throw NumericError("frequency sample misses the cone piece");

  // Directions orthogonal to v_j.
  const auto basis = complement_basis(v_j);
  std::vector<std::vector<double>> around;
  if (n == 2) {
    around = {basis[0], {-basis[0][0], -basis[0][1]}};
  } else if (n == 3) {
    for (int a = 0; a < sample.azimuth_steps; ++a) {
      const double phi = 2.0 * kPi * a / sample.azimuth_steps;
      std::vector<double> w(n);
      for (int i = 0; i < n; ++i) w[i] = std::cos(phi) * basis[0][i] + std::sin(phi) * basis[1][i];
      around.push_back(std::move(w));
    }
  } else {
    const auto pts = covering_grid(n - 1, 2.0 * kPi / sample.azimuth_steps, false, 1u << 22);
    for (std::size_t p = 0; p + n - 1 <= pts.size(); p += n - 1) {
      std::vector<double> w(n, 0.0);
      for (int b = 0; b < n - 1; ++b)
        for (int i = 0; i < n; ++i) w[i] += pts[p + b] * basis[b][i];
      around.push_back(std::move(w));
    }
  }

  double best = 0.0;
  std::size_t hits = 0;
  std::vector<double> xi(n);
  for (int p = 0; p <= sample.polar_steps; ++p) {
    if (p == 0 && cone.l > 0) continue;
    const double t = lo + (hi - lo) * p / sample.polar_steps;
    const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
    for (double sign : {1.0, -1.0}) {
      for (const auto& w : around) {
        for (double r : sample.radii) {
          for (int i = 0; i < n; ++i) xi[i] = r * (sign * t * v_j[i] + s * w[i]);
          if (shell_index(v_j, cone.delta, cone.c, xi) != cone.l) continue;
          ++hits;
          const Complex d = m(dot(v.coords(), xi)) - m(dot(v_j.coords(), xi));
          require_finite(d);
          best = std::max(best, std::abs(d));
        }
      }
    }
  }
  if (hits == 0) throw NumericError("frequency sample misses the cone piece");
  return best;
}

KernelReport kernel_decay_check(const Direction& v, const Direction& v_j, const MultiplierSpec& m,
                                const ConeSpec& cone, int k, const KernelGrid& kg) {
  cone.validate();
  const int n = kg.dim;
  if (v.dim() != n || v_j.dim() != n) throw std::invalid_argument("dimension mismatch");
  if (distance(v_j, Direction::axis(n, n - 1)) > 1e-12)
    throw std::invalid_argument("kernel check works in the frame v_j = e_n");
  if (distance(v, v_j) > cone.delta * (1.0 + 1e-12)) throw std::invalid_argument("|v - v_j| exceeds the cone delta");
  if (!(kg.box_length > 0.0)) throw std::invalid_argument("box length must be positive");

  const double nyquist = kPi * kg.points_per_axis / kg.box_length;
  const double spacing = 2.0 * kPi / kg.box_length;
  if (std::ldexp(1.0, k + 1) > nyquist || std::ldexp(1.0, k - 1) < spacing)
    throw ConfigError("grid cannot resolve the frequency annulus 2^k");

  GridField grid(n, kg.points_per_axis, kg.box_length);
  const double width = std::ldexp(cone.delta, cone.l);
  const double c = cone.c;
  bool any = false;
  auto symbol = [&](std::span<const double> xi) {
    const double r = norm(xi);
    if (r == 0.0) return Complex(0.0, 0.0);
    const double cut = shell_bump(xi[n - 1] / (r * width), c) * lp_profile(std::ldexp(r, -k));
    if (cut == 0.0) return Complex(0.0, 0.0);
    return (m(dot(v.coords(), xi)) - m(xi[n - 1])) * cut;
  };
  auto mult = multiplier_on_grid(grid, symbol);
  for (const Complex& z : mult) any = any || z != Complex(0.0, 0.0);

  KernelReport rep;
  if (!any) {
    rep.zero_kernel = true;
    return rep;
  }
  // K is the inverse transform of the multiplier itself, scaled to a Riemann sum.
  GridField kernel = inverse_dft(std::move(mult), grid);
  const double scale = std::pow(kg.points_per_axis * spacing, n);

  const double two_k = std::ldexp(1.0, k);
  const double numer = std::ldexp(1.0, -cone.l) * std::pow(two_k, n) * width;
  std::vector<int> digits(n);
  for (std::size_t idx = 0; idx < kernel.size(); ++idx) {
    kernel.multi_index(idx, digits);
    double denom = 1.0;
    for (int i = 0; i < n; ++i) {
      int d = digits[i];
      if (d >= kg.points_per_axis / 2) d -= kg.points_per_axis;
      const double x = std::abs(d * kernel.spacing());
      const double f = (i == n - 1) ? 1.0 + two_k * width * x : 1.0 + two_k * x;
      denom *= f * f;
    }
    const double val = std::abs(kernel[idx]) * scale;
    const double ratio = val / (numer / denom);
    rep.max_abs_kernel = std::max(rep.max_abs_kernel, val);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (idx == 0) rep.ratio_at_origin = ratio;
  }
  return rep;
}


GridField random_band_limited_field(int dim, int points_per_axis, double box_length, int band, std::uint64_t seed) {
  GridField grid(dim, points_per_axis, box_length);
  if (band < 1 || band >= points_per_axis / 2) throw std::invalid_argument("band must lie in [1, N/2)");
  Engine eng = make_engine(seed, 0x6669656c64);
  std::vector<Complex> spec(grid.size());
  std::vector<int> k(dim);
  for (std::size_t idx = 0; idx < spec.size(); ++idx) {
    // Draw for every entry so the stream does not depend on the band.
    const double u1 = 1.0 - uniform01(eng), u2 = uniform01(eng), u3 = uniform01(eng);
    const double rad = std::sqrt(-2.0 * std::log(u1));
    grid.wave_number(idx, k);
    bool inside = true;
    for (int v : k) inside = inside && std::abs(v) <= band;
    if (inside) spec[idx] = std::polar(rad, 2.0 * kPi * u2) * (0.5 + u3);
  }
  GridField f = inverse_dft(std::move(spec), grid);
  double mx = 0.0;
  for (auto& z : f.values()) {
    z = Complex(z.real(), 0.0);
    mx = std::max(mx, std::abs(z.real()));
  }
  if (!(mx > 0.0)) throw NumericError("random field vanished");
  for (auto& z : f.values()) z /= mx;
  return f;
}

GridField ball_indicator_field(int dim, int points_per_axis, double box_length, double radius, double smoothing) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  if (!(smoothing >= 0.0)) throw std::invalid_argument("smoothing must be non-negative");
  const double half = box_length / 2.0;
  GridField f = GridField::from_function(dim, points_per_axis, box_length, [&](std::span<const double> x) {
    double r2 = 0.0;
    for (double c : x) r2 += (c - half) * (c - half);
    return Complex(r2 < radius * radius ? 1.0 : 0.0, 0.0);
  });
  if (smoothing == 0.0) return f;
  GridField g = apply_multiplier(f, [smoothing](std::span<const double> xi) {
    return Complex(radial_cutoff(smoothing * norm(xi)), 0.0);
  });
  for (auto& z : g.values()) z = Complex(z.real(), 0.0);
  return g;
}

}  // namespace dirmax
