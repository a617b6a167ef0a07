// Acceptance gate: one PASS/FAIL line per criterion, exit 0 only if all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "dirmax/cone_counts.hpp"
#include "dirmax/experiment.hpp"
#include "dirmax/field_ops.hpp"
#include "dirmax/maximal_ops.hpp"
#include "dirmax/parallel.hpp"
#include "dirmax/sphere_nets.hpp"

using namespace dirmax;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string num(double x, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

std::string slope_text(const FitReport& f) {
  std::string s = f.y_label + " slope " + num(f.slope);
  if (f.target) s += " (target " + num(*f.target) + " +- " + num(f.tolerance) + ")";
  return s;
}

bool check_passed(const ExperimentResult& r, const std::string& prefix) {
  bool ok = true;
  for (const auto& c : r.summary["checks"])
    if (c["name"].get<std::string>().rfind(prefix, 0) == 0) ok = ok && c["pass"].get<bool>();
  return ok;
}

std::size_t check_count(const ExperimentResult& r, const std::string& prefix) {
  std::size_t n = 0;
  for (const auto& c : r.summary["checks"])
    if (c["name"].get<std::string>().rfind(prefix, 0) == 0) ++n;
  return n;
}

double rel_l2(const GridField& a, const GridField& b) { return (a - b).l2_norm() / b.l2_norm(); }

double max_abs(const GridField& f) {
  double m = 0.0;
  for (const auto& z : f.values()) m = std::max(m, std::abs(z));
  return m;
}

GridField random_complex(int dim, int n, double len, std::uint64_t seed) {
  const auto re = random_band_limited_field(dim, n, len, n / 2 - 1, seed);
  const auto im = random_band_limited_field(dim, n, len, n / 2 - 1, seed + 7919);
  GridField out = re;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = Complex(re[i].real(), im[i].real());
  return out;
}

GridField minus_mean(const GridField& f) {
  GridField g = f;
  const Complex mean = f.mean();
  for (auto& z : g.values()) z -= mean;
  return g;
}

// ---- criteria ----------------------------------------------------------------

Outcome sharpness(int dim, double budget_seconds) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = compute_experiment(default_experiment("sharpness", dim));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Outcome o;
  for (const auto& f : r.fits) o.require(f.pass, slope_text(f));
  o.require(secs < budget_seconds, "runtime " + num(secs, 3) + " s < " + num(budget_seconds, 3) + " s");
  return o;
}

const ExperimentResult& el_scaling() {
  static const ExperimentResult r = compute_experiment(default_experiment("el-scaling", 3));
  return r;
}

Outcome e0_scaling() {
  const auto& r = el_scaling();
  Outcome o;
  o.require(r.fits.at(0).pass, slope_text(r.fits.at(0)));
  double worst = 0.0;
  for (const auto& s : r.summary["scales"])
    worst = std::max(worst, s["E0_upper"].get<double>() / s["E0_lower"].get<double>());
  o.require(check_passed(r, "E0 gap") && check_count(r, "E0 gap") >= 4, "max bracket gap " + num(worst) + " <= 2");
  return o;
}

Outcome sigma_scaling() {
  const auto& r = el_scaling();
  Outcome o;
  o.require(r.fits.at(1).pass, slope_text(r.fits.at(1)));
  return o;
}

Outcome certifier_exponents() {
  Outcome o;
  const auto c3 = default_experiment("certify-scaling", 3);
  o.require(c3.deltas.size() >= 4, std::to_string(c3.deltas.size()) + " dyadic scales");
  const auto r3 = compute_experiment(c3);
  for (const auto& f : r3.fits) o.require(f.pass, "n=3 " + slope_text(f));
  const auto r2 = compute_experiment(default_experiment("certify-scaling", 2));
  const auto& f2 = r2.fits.at(0);
  o.require(f2.pass, "n=2 bound_T vs depth r^2 " + num(f2.r_squared) + " >= " + num(f2.tolerance));
  return o;
}

Outcome multiplier_decay() {
  const auto r = compute_experiment(default_experiment("multiplier-decay", 3));
  Outcome o;
  o.require(check_passed(r, "decay"), std::to_string(check_count(r, "decay")) + " shell maxima within C 2^-l");
  o.require(check_passed(r, "hilbert zero"),
            std::to_string(check_count(r, "hilbert zero")) + " Hilbert shell maxima exactly 0");
  return o;
}

Outcome kernel_decay() {
  const auto r = compute_experiment(default_experiment("kernel-decay", 3));
  Outcome o;
  o.require(check_passed(r, "grid doubling"), "ratio change under N=64 -> 128 within factor 2");
  double spread = 0.0;
  for (const auto& c : r.summary["checks"])
    if (c["name"] == "level spread") spread = c["value"].get<double>();
  o.require(check_passed(r, "level spread"), "spread over l=1..4 " + num(spread) + " <= 4");
  return o;
}

// Constants fitted on one corpus, frozen with a fixed margin, then applied to a
// disjoint corpus. Zero violations are required.
Outcome domination_suite() {
  constexpr int kDim = 3, kN = 32, kFields = 10;
  constexpr double kLen = 8.0, kDelta = 0.25, kMargin = 1.5;
  const Direction en = Direction::axis(kDim, kDim - 1);
  const Direction tilted = Direction::normalized({0.1, 0.05, 1.0});
  const Domination kinds[4] = {Domination::NikodymByDirectional, Domination::LowPassByNikodym,
                               Domination::HighPassByCone, Domination::DirectionalByPieces};

  std::vector<GridField> calibration, test;
  for (int i = 0; i < kFields; ++i) {
    calibration.push_back(random_band_limited_field(kDim, kN, kLen, 4, 100 + i));
    test.push_back(random_band_limited_field(kDim, kN, kLen, 4, 200 + i));
  }
  calibration.push_back(ball_indicator_field(kDim, kN, kLen, 1.0));

  Outcome o;
  for (Domination kind : kinds) {
    const Direction& v = kind == Domination::DirectionalByPieces ? tilted : en;
    // Scales up to L/delta let the thin side of a Nikodym rectangle span the
    // period, the grid analogue of the sup over all h > 0.
    const ScaleGrid scales = ScaleGrid::geometric(kLen / kN, kLen / kDelta);
    const auto terms = [&](const GridField& f) { return domination_terms(kind, f, v, kDelta, scales); };
    double C = 0.0;
    for (const auto& f : calibration) C = std::max(C, domination_constant(terms(f), 1e-9 * max_abs(f)));
    std::size_t violations = 0, points = 0;
    double worst = 0.0;
    for (const auto& f : test) {
      const auto t = terms(f);
      const double atol = 1e-9 * max_abs(f);
      violations += domination_violations(t, kMargin * C, atol);
      worst = std::max(worst, domination_constant(t, atol));
      points += f.size();
    }
    o.require(std::isfinite(C) && C > 0.0 && violations == 0,
              std::string(domination_name(kind)) + " C=" + num(C) + " test max " + num(worst) + ", " +
                  std::to_string(violations) + "/" + std::to_string(points) + " violations");
  }
  return o;
}

Outcome algebra_suite() {
  Outcome o;
  const auto f = random_complex(3, 16, 6.0, 31);
  // Irrational ratios keep every nonzero lattice frequency off the hyperplane v.xi = 0.
  const auto v = Direction::normalized({1.0, std::sqrt(2.0), std::sqrt(3.0)});

  // Plancherel: unimodular multipliers are isometries off the zero mode, and
  // the bound by the sampled symbol maximum is attained on its argmax mode.
  {
    const auto g = minus_mean(f);
    double worst = 0.0;
    for (const auto& m : {MultiplierSpec::hilbert(), MultiplierSpec::imaginary_power(1.0)})
      worst = std::max(worst, std::abs(directional_singular(g, v, m).l2_norm() / g.l2_norm() - 1.0));
    const Symbol sym = average_symbol(v, 0.9, default_phi());
    const auto values = multiplier_on_grid(f, sym);
    std::size_t arg = 0;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (std::abs(values[i]) > std::abs(values[arg])) arg = i;
    const double top = std::abs(values[arg]);
    const double excess = apply_multiplier(f, sym).l2_norm() / (top * f.l2_norm()) - 1.0;
    std::vector<int> k(3);
    f.wave_number(arg, k);
    const auto mode = GridField::from_function(3, 16, 6.0, [&](std::span<const double> x) {
      double ph = 0.0;
      for (int i = 0; i < 3; ++i) ph += 2.0 * std::numbers::pi / 6.0 * k[i] * x[i];
      return std::polar(1.0, ph);
    });
    const double gap = std::abs(apply_multiplier(mode, sym).l2_norm() / (top * mode.l2_norm()) - 1.0);
    o.require(worst <= 1e-10 && excess <= 1e-10 && gap <= 1e-10,
              "Plancherel " + num(std::max({worst, excess, gap}), 2) + " <= 1e-10");
  }

  // Cone pieces: idempotent, mutually annihilating, summing to f.
  {
    const ConeSpec base{v, 0.1, 1.0, 0};
    const int L = base.saturation();
    GridField sum(3, 16, 6.0);
    double idem = 0.0, cross = 0.0;
    for (int l = 0; l <= L; ++l) {
      ConeSpec cone = base;
      cone.l = l;
      const auto r = cone_restrict(f, cone);
      idem = std::max(idem, max_abs_difference(cone_restrict(r, cone), r) / max_abs(f));
      for (int m = 0; m <= L; ++m) {
        if (m == l) continue;
        ConeSpec other = base;
        other.l = m;
        cross = std::max(cross, cone_restrict(r, other).l2_norm() / f.l2_norm());
      }
      sum = sum + r;
    }
    o.require(idem <= 1e-10 && cross <= 1e-10, "projection idempotence " + num(std::max(idem, cross), 2) + " <= 1e-10");
    const double part = rel_l2(sum, f);
    o.require(part <= 1e-10, "shell partition " + num(part, 2) + " <= 1e-10");
  }

  // Littlewood-Paley pieces sum to f minus its mean.
  {
    const auto g = random_complex(2, 64, 2.0 * std::numbers::pi, 32);
    const auto [lo, hi] = littlewood_paley_range(g);
    GridField sum(2, 64, 2.0 * std::numbers::pi);
    for (int k = lo; k <= hi; ++k) sum = sum + littlewood_paley(g, k);
    const double err = max_abs_difference(sum, minus_mean(g)) / max_abs(g);
    o.require(err <= 1e-8, "Littlewood-Paley reconstruction " + num(err, 2) + " <= 1e-8");
  }

  // Conjugate-symmetric symbols keep real fields real.
  {
    const auto r = random_band_limited_field(3, 16, 6.0, 7, 33);
    double worst = 0.0;
    worst = std::max(worst, directional_singular(r, v, MultiplierSpec::hilbert()).max_abs_imag());
    worst = std::max(worst, directional_average(r, v, 1.3).max_abs_imag());
    worst = std::max(worst, littlewood_paley(r, 1).max_abs_imag());
    worst = std::max(worst, cone_restrict(r, {v, 0.1, 1.0, 1}).max_abs_imag());
    worst /= max_abs(r);
    o.require(worst <= 1e-10, "realness " + num(worst, 2) + " <= 1e-10");
  }

  // A_{v,h}(I - phi(h delta D)) f does not see frequencies outside C_{v,delta}.
  {
    const double delta = 0.2;
    double worst = 0.0;
    for (double h : {0.5, 1.0, 4.0}) {
      const Symbol high = [&](std::span<const double> xi) {
        double r2 = 0.0;
        for (double x : xi) r2 += x * x;
        return Complex(1.0 - radial_cutoff(h * delta * std::sqrt(r2)), 0.0);
      };
      const auto direct = directional_average(apply_multiplier(f, high), v, h);
      for (double w : {delta, 1.5 * delta}) {
        const auto restricted = directional_average(apply_multiplier(cone_restrict(f, {v, w, 1.0, 0}), high), v, h);
        worst = std::max(worst, max_abs_difference(restricted, direct) / std::max(1.0, max_abs(direct)));
      }
    }
    o.require(worst <= 1e-10, "support identity " + num(worst, 2) + " <= 1e-10");
  }
  return o;
}

Outcome trivial_bound_guard() {
  Outcome o;
  std::size_t runs = 0, violations = 0;
  double worst = 0.0;
  const MultiplierSpec specs[2] = {MultiplierSpec::hilbert(), MultiplierSpec::imaginary_power(1.0)};
  for (int dim : {2, 3}) {
    const int n = dim == 2 ? 64 : 16;
    std::vector<GridField> fields{ball_indicator_field(dim, n, 8.0, 1.0)};
    for (int s = 0; s < 3; ++s) fields.push_back(random_band_limited_field(dim, n, 8.0, 3, 300 + s));
    for (double delta : {0.8, 0.4, 0.2}) {
      const auto net = build_maximal_net(dim, delta, 5);
      for (const auto& m : specs)
        for (const auto& f : fields) {
          const double bound = std::sqrt(static_cast<double>(net.size())) * m.sup_norm;
          const double ratio = maximal_singular(f, net, m).l2_ratio;
          ++runs;
          if (!(ratio <= bound * (1.0 + 1e-12))) ++violations;
          worst = std::max(worst, ratio / bound);
        }
    }
  }
  o.require(violations == 0, std::to_string(runs) + " runs, max l2_ratio / bound " + num(worst) + ", " +
                                 std::to_string(violations) + " violations");
  const auto gm = compute_experiment(default_experiment("grid-maximal", 2));
  o.require(check_passed(gm, "trivial bound"),
            "grid-maximal " + std::to_string(check_count(gm, "trivial bound")) + " trivial-bound checks");
  return o;
}

}  // namespace

// Optional arguments select criteria by number; the default runs all of them.
int main(int argc, char** argv) {
  set_thread_count(1);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"sharpness slope n=3", [] { return sharpness(3, 300.0); }},
      {"sharpness slope n=4", [] { return sharpness(4, 900.0); }},
      {"E_0 scaling", e0_scaling},
      {"sum 2^-l sqrt(E_l) scaling", sigma_scaling},
      {"certifier exponents", certifier_exponents},
      {"multiplier difference decay", multiplier_decay},
      {"kernel decay", kernel_decay},
      {"domination suite", domination_suite},
      {"operator algebra suite", algebra_suite},
      {"trivial-bound guard", trivial_bound_guard},
  };
  std::vector<bool> selected(criteria.size(), argc == 1);
  for (int a = 1; a < argc; ++a) {
    const int k = std::atoi(argv[a]);
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[a]);
      return 2;
    }
    selected[k - 1] = true;
  }
  int failed = 0, ran = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
