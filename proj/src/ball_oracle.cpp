#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dirmax/error.hpp"
#include "dirmax/maximal_ops.hpp"
#include "dirmax/parallel.hpp"
#include "dirmax/quadrature.hpp"
#include "dirmax/rng.hpp"
#include "dirmax/sphere_nets.hpp"

namespace dirmax {

namespace {

constexpr double kPi = std::numbers::pi;

// Endpoints of {t : |x - v t| < 1}; false when the line misses the open ball.
bool chord(std::span<const double> x, std::span<const double> v, double& a, double& b) {
  double xv = 0.0, x2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xv += x[i] * v[i];
    x2 += x[i] * x[i];
  }
  const double disc = xv * xv - x2 + 1.0;
  if (!(disc > 0.0)) return false;
  const double s = std::sqrt(disc);
  a = xv - s;
  b = xv + s;
  return true;
}

double average_from_chord(double a, double b) {
  if (a < 0.0 && b > 0.0) return 1.0;
  return a >= 0.0 ? (b - a) / (2.0 * b) : (b - a) / (2.0 * -a);
}

double hilbert_from_chord(double a, double b) {
  if (a < 0.0 && b > 0.0) return std::log(b / -a) / kPi;
  return std::log1p((b - a) / a) / kPi;
}

double sphere_area(int n) { return 2.0 * std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0); }
double ball_volume(int n) { return std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0 + 1.0); }

// Quasi-uniform angular sample: a spiral on S^2, uniform random points otherwise.
std::vector<double> angular_sample(int n, int count, Engine& eng) {
  std::vector<double> pts(static_cast<std::size_t>(n) * count);
  if (n == 3) {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = -1.0 + (2.0 * i + 1.0) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      pts[3 * i] = r * std::cos(golden * i);
      pts[3 * i + 1] = r * std::sin(golden * i);
      pts[3 * i + 2] = z;
    }
    return pts;
  }
  for (int i = 0; i < count; ++i) {
    double n2 = 0.0;
    for (int k = 0; k < n; k += 2) {
      const double u1 = 1.0 - uniform01(eng), u2 = uniform01(eng);
      const double rad = std::sqrt(-2.0 * std::log(u1));
      pts[i * n + k] = rad * std::cos(2.0 * kPi * u2);
      if (k + 1 < n) pts[i * n + k + 1] = rad * std::sin(2.0 * kPi * u2);
    }
    for (int k = 0; k < n; ++k) n2 += pts[i * n + k] * pts[i * n + k];
    const double inv = 1.0 / std::sqrt(n2);
    for (int k = 0; k < n; ++k) pts[i * n + k] *= inv;
  }
  return pts;
}

struct ShellSums {
  double avg_full = 0.0, hil_full = 0.0;  // mean of F^2 over all angular points
  double avg_half = 0.0, hil_half = 0.0;  // over the even-indexed half
};

ShellSums shell_means(int n, double r, const std::vector<double>& dirs, const std::vector<double>& angles) {
  const std::size_t m = angles.size() / n;
  const std::size_t k = dirs.size() / n;
  ShellSums s;
  std::vector<double> x(n);
  for (std::size_t p = 0; p < m; ++p) {
    for (int i = 0; i < n; ++i) x[i] = r * angles[p * n + i];
    double fa = 0.0, fh = 0.0, a, b;
    for (std::size_t d = 0; d < k; ++d) {
      if (!chord(x, std::span<const double>(&dirs[d * n], n), a, b)) continue;
      fa = std::max(fa, average_from_chord(a, b));
      fh = std::max(fh, std::abs(hilbert_from_chord(a, b)));
    }
    s.avg_full += fa * fa;
    s.hil_full += fh * fh;
    if (p % 2 == 0) {
      s.avg_half += fa * fa;
      s.hil_half += fh * fh;
    }
  }
  const double half = static_cast<double>((m + 1) / 2);
  s.avg_full /= m;
  s.hil_full /= m;
  s.avg_half /= half;
  s.hil_half /= half;
  return s;
}

}  // namespace

double ball_oracle_average(std::span<const double> x, const Direction& v) {
  if (x.size() != static_cast<std::size_t>(v.dim())) throw std::invalid_argument("point and direction dimensions differ");
  double a, b;
  return chord(x, v.coords(), a, b) ? average_from_chord(a, b) : 0.0;
}

double ball_oracle_hilbert(std::span<const double> x, const Direction& v) {
  if (x.size() != static_cast<std::size_t>(v.dim())) throw std::invalid_argument("point and direction dimensions differ");
  double a, b;
  return chord(x, v.coords(), a, b) ? hilbert_from_chord(a, b) : 0.0;
}

SharpnessReport sharpness_scan(int dim, const std::vector<double>& deltas, const std::vector<std::uint64_t>& seeds,
                               const SharpnessOptions& opts) {
  if (dim < 3) throw std::invalid_argument("sharpness scan needs dim >= 3");
  if (deltas.empty() || seeds.empty()) throw std::invalid_argument("sharpness scan needs deltas and seeds");
  for (double d : deltas)
    if (!(d > 0.0 && d < 1.0)) throw std::invalid_argument("deltas must lie in (0, 1)");
  if (opts.radial_nodes < 2 || opts.inner_nodes < 2) throw std::invalid_argument("too few radial nodes");
  const int m = opts.angular_points > 0 ? opts.angular_points : (dim == 3 ? 4096 : 2048);
  if (m < 16) throw std::invalid_argument("too few angular points");

  const auto inner = gauss_legendre(opts.inner_nodes);
  const auto outer = gauss_legendre(opts.radial_nodes);
  SharpnessReport rep;
  rep.dim = dim;
  for (std::size_t di = 0; di < deltas.size(); ++di) {
    const double delta = deltas[di];
    for (std::uint64_t seed : seeds) {
      const DirectionSet net = build_maximal_net(dim, delta, seed);
      std::vector<double> dirs = net.flat();
      if (opts.single_direction) dirs.resize(dim);

      // Nodes (r, weight) for int_0^{1/delta} g(r) r^{n-1} dr. The ball itself
      // adds a bounded term that the oracles give exactly.
      std::vector<std::pair<double, double>> nodes;
      for (std::size_t i = 0; i < inner.first.size(); ++i) {
        const double r = 0.5 * (1.0 + inner.first[i]);
        nodes.push_back({r, 0.5 * inner.second[i] * std::pow(r, dim - 1)});
      }
      const double span = std::log(1.0 / delta);
      for (std::size_t i = 0; i < outer.first.size(); ++i) {
        const double u = 0.5 * span * (1.0 + outer.first[i]);
        const double r = std::exp(u);
        nodes.push_back({r, 0.5 * span * outer.second[i] * std::pow(r, dim)});
      }

      std::vector<ShellSums> shells(nodes.size());
      const std::uint64_t base = derive_seed(seed, 0x7368617270ULL + di);
      parallel_chunks(nodes.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
          Engine eng = make_engine(base, k);
          const auto rot = random_rotation(dim, eng);
          const auto raw = angular_sample(dim, m, eng);
          std::vector<double> angles(raw.size());
          for (int p = 0; p < m; ++p)
            for (int i = 0; i < dim; ++i) {
              double s = 0.0;
              for (int j = 0; j < dim; ++j) s += rot[i * dim + j] * raw[p * dim + j];
              angles[p * dim + i] = s;
            }
          shells[k] = shell_means(dim, nodes[k].first, dirs, angles);
        }
      });

      double avg = 0.0, hil = 0.0, avg_half = 0.0, hil_half = 0.0;
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        avg += nodes[k].second * shells[k].avg_full;
        hil += nodes[k].second * shells[k].hil_full;
        avg_half += nodes[k].second * shells[k].avg_half;
        hil_half += nodes[k].second * shells[k].hil_half;
      }
      const double area = sphere_area(dim), vol = ball_volume(dim);
      auto ratio = [&](double q) { return std::sqrt(q * area / vol); };
      SharpnessPoint pt{delta, seed, net.size(), ratio(avg), ratio(hil)};
      const double dev = std::max(std::abs(ratio(avg_half) / pt.ratio_average - 1.0),
                                  std::abs(ratio(hil_half) / pt.ratio_hilbert - 1.0));
      if (!(dev <= opts.convergence_tol))
        throw NumericError("sharpness quadrature did not converge at delta = " + std::to_string(delta));
      rep.points.push_back(pt);
    }
  }

  std::vector<double> xs, ya, yh;
  for (const auto& p : rep.points) {
    xs.push_back(static_cast<double>(p.count));
    ya.push_back(p.ratio_average);
    yh.push_back(p.ratio_hilbert);
  }
  if (rep.points.size() >= 3) {
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() != sorted.back()) {
      rep.fit_average = fit_loglog(xs, ya);
      rep.fit_hilbert = fit_loglog(xs, yh);
      rep.fit_average.x_label = rep.fit_hilbert.x_label = "log count";
      rep.fit_average.y_label = "log ratio_average";
      rep.fit_hilbert.y_label = "log ratio_hilbert";
    }
  }
  return rep;
}

}  // namespace dirmax
