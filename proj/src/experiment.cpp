#include "dirmax/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <ostream>
#include <sstream>

#include "dirmax/certifier.hpp"
#include "dirmax/cone_counts.hpp"
#include "dirmax/error.hpp"
#include "dirmax/field_ops.hpp"
#include "dirmax/maximal_ops.hpp"
#include "dirmax/parallel.hpp"
#include "dirmax/rng.hpp"
#include "dirmax/sphere_nets.hpp"

namespace dirmax {
namespace {

using Params = std::map<std::string, double>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double x = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + key + ": '" + text + "'");
  }
}

std::uint64_t parse_seed(const std::string& text) {
  try {
    std::size_t used = 0;
    if (!text.empty() && text[0] == '-') throw std::invalid_argument(text);
    const auto x = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad seed: '" + text + "'");
  }
}

int parse_int(const std::string& key, const std::string& text) {
  const double x = parse_number(key, text);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw ConfigError(key + " must be an integer");
  return static_cast<int>(x);
}

bool is_power_of_two(int n) { return n >= 2 && (n & (n - 1)) == 0; }

double theorem_exponent(int dim) { return (dim - 2.0) / (2.0 * (dim - 1.0)); }

std::string fmt(double x) { return format_double(x); }

struct Check {
  std::string name;
  double value;
  double limit;
  bool pass;
};

// Accumulates rows, fits and checks; owns the partial-artifact state.
struct Run {
  const ExperimentConfig& cfg;
  ExperimentResult res;
  std::vector<Check> checks;

  explicit Run(const ExperimentConfig& c) : cfg(c) { res.kind = c.kind; }

  void row(std::vector<std::string> r) { res.table.rows.push_back(std::move(r)); }
  void check(const std::string& name, double value, double limit, bool ok) {
    checks.push_back({name, value, limit, ok});
    if (!ok) res.failures.push_back(name + ": " + fmt(value) + " vs limit " + fmt(limit));
  }
  void fit(FitReport f) {
    if (!f.pass) {
      std::string what = f.y_label + " vs " + f.x_label + ": slope " + fmt(f.slope);
      if (f.target) what += " target " + fmt(*f.target) + " +- " + fmt(f.tolerance);
      else what += " r^2 " + fmt(f.r_squared) + " < " + fmt(f.tolerance);
      res.failures.push_back(what);
    }
    res.fits.push_back(std::move(f));
  }
};

// ---- net-scaling -------------------------------------------------------------

void net_scaling(Run& run) {
  const auto& cfg = run.cfg;
  run.res.table.header = {"delta", "seed", "count", "min_separation", "covering_radius"};
  struct Job {
    double delta;
    std::uint64_t seed;
    std::size_t count = 0;
    double sep = 0, cover = 0;
    bool valid = false;
  };
  std::vector<Job> jobs;
  for (double d : cfg.deltas)
    for (auto s : cfg.seeds) jobs.push_back({d, s});
  const double res_factor = cfg.param("coverage_resolution");
  parallel_chunks(jobs.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Job& j = jobs[i];
      const DirectionSet net = build_maximal_net(cfg.dim, j.delta, j.seed);
      j.count = net.size();
      j.sep = net.size() > 1 ? min_pairwise_distance(net) : 2.0;
      j.valid = satisfies_invariants(net);
      j.cover = sampled_covering_radius(net, res_factor * j.delta, derive_seed(j.seed, 1), 200'000);
    }
  });
  std::vector<double> xs, ys;
  const double cover_tol = cfg.tolerance("covering");
  for (const Job& j : jobs) {
    run.row({fmt(j.delta), std::to_string(j.seed), std::to_string(j.count), fmt(j.sep), fmt(j.cover)});
    const std::string tag = "delta=" + fmt(j.delta) + " seed=" + std::to_string(j.seed);
    run.check("separation " + tag, j.sep, j.delta, j.valid);
    run.check("covering " + tag, j.cover, j.delta * (1 + cover_tol), j.cover <= j.delta * (1 + cover_tol));
    xs.push_back(1.0 / j.delta);
    ys.push_back(static_cast<double>(j.count));
  }
  FitReport f = fit_loglog(xs, ys);
  f.x_label = "1/delta";
  f.y_label = "count";
  f.judge(cfg.dim - 1.0, cfg.tolerance("slope"));
  run.fit(std::move(f));
}

// ---- el-scaling --------------------------------------------------------------

void el_scaling(Run& run) {
  const auto& cfg = run.cfg;
  run.res.table.header = {"delta", "seed", "caps", "l", "lower", "upper"};
  const double C = cfg.param("cover_scale");
  const double c = cfg.param("c");
  std::vector<double> xs, e0, sig;
  Json per_scale = Json::array();
  for (double d : cfg.deltas) {
    for (auto seed : cfg.seeds) {
      const DirectionSet net = build_maximal_net(cfg.dim, d, seed);
      const CapCover cover = build_cap_cover(net, C * d, c);
      const int L = saturation_level(cover);
      const auto br = bracket_El_range(cover, L, cfg.param("resolution") * C * d);
      double sigma = 0.0;
      for (const auto& b : br) {
        run.row({fmt(d), std::to_string(seed), std::to_string(cover.cap_count()), std::to_string(b.l),
                 std::to_string(b.lower), std::to_string(b.upper)});
        sigma += std::ldexp(std::sqrt(static_cast<double>(b.lower)), -b.l);
      }
      // Shells past saturation hold every cap: sum_{l > L} 2^{-l} sqrt(#caps).
      sigma += std::ldexp(std::sqrt(static_cast<double>(cover.cap_count())), -L);
      const double gap = static_cast<double>(br[0].upper) / br[0].lower;
      run.check("E0 gap delta=" + fmt(d) + " seed=" + std::to_string(seed), gap, cfg.tolerance("gap"),
                gap <= cfg.tolerance("gap"));
      per_scale.push_back({{"delta", d}, {"seed", seed}, {"caps", cover.cap_count()}, {"levels", L},
                           {"E0_lower", br[0].lower}, {"E0_upper", br[0].upper}, {"sigma_lower", sigma}});
      xs.push_back(1.0 / d);
      e0.push_back(br[0].lower);
      sig.push_back(sigma);
    }
  }
  run.res.summary["scales"] = per_scale;
  FitReport f0 = fit_loglog(xs, e0);
  f0.x_label = "1/delta";
  f0.y_label = "E0_lower";
  f0.judge(cfg.dim - 2.0, cfg.tolerance("e0_slope"));
  run.fit(std::move(f0));
  FitReport fs = fit_loglog(xs, sig);
  fs.x_label = "1/delta";
  fs.y_label = "sigma_lower";
  fs.judge((cfg.dim - 2.0) / 2.0, cfg.tolerance("sigma_slope"));
  run.fit(std::move(fs));
}

// ---- sharpness ---------------------------------------------------------------

void sharpness(Run& run) {
  const auto& cfg = run.cfg;
  run.res.table.header = {"delta", "seed", "count", "ratio_average", "ratio_hilbert"};
  SharpnessOptions opts;
  opts.radial_nodes = static_cast<int>(cfg.param("radial_nodes"));
  opts.inner_nodes = static_cast<int>(cfg.param("inner_nodes"));
  opts.angular_points = static_cast<int>(cfg.param("angular_points"));
  opts.single_direction = cfg.param("single_direction") != 0.0;
  opts.convergence_tol = cfg.tolerance("convergence");
  SharpnessReport rep = sharpness_scan(cfg.dim, cfg.deltas, cfg.seeds, opts);
  for (const auto& p : rep.points)
    run.row({fmt(p.delta), std::to_string(p.seed), std::to_string(p.count), fmt(p.ratio_average),
             fmt(p.ratio_hilbert)});
  const double target = opts.single_direction ? 0.0 : theorem_exponent(cfg.dim);
  rep.fit_average.judge(target, cfg.tolerance("slope"));
  rep.fit_hilbert.judge(target, cfg.tolerance("slope"));
  run.fit(rep.fit_average);
  run.fit(rep.fit_hilbert);
}

// ---- grid-maximal ------------------------------------------------------------

void grid_maximal(Run& run) {
  const auto& cfg = run.cfg;
  run.res.table.header = {"delta", "seed", "count", "l2_ratio_hilbert", "l2_ratio_average", "trivial_bound"};
  const GridField f = ball_indicator_field(cfg.dim, cfg.grid, cfg.param("box_length"), cfg.param("radius"),
                                           cfg.param("smoothing"));
  const MultiplierSpec h = MultiplierSpec::hilbert();
  const ScaleGrid scales = ScaleGrid::for_grid(f);
  std::vector<double> xs, yh, ya;
  for (double d : cfg.deltas) {
    for (auto seed : cfg.seeds) {
      const DirectionSet net = build_maximal_net(cfg.dim, d, seed);
      const MaximalReport rh = maximal_singular(f, net, h);
      const MaximalReport ra = maximal_average(f, net, scales);
      const double bound = std::sqrt(static_cast<double>(net.size())) * h.sup_norm;
      run.row({fmt(d), std::to_string(seed), std::to_string(net.size()), fmt(rh.l2_ratio), fmt(ra.l2_ratio),
               fmt(bound)});
      run.check("trivial bound delta=" + fmt(d) + " seed=" + std::to_string(seed), rh.l2_ratio,
                bound * (1 + cfg.tolerance("trivial")), rh.l2_ratio <= bound * (1 + cfg.tolerance("trivial")));
      xs.push_back(static_cast<double>(net.size()));
      yh.push_back(rh.l2_ratio);
      ya.push_back(ra.l2_ratio);
    }
  }
  FitReport fh = fit_loglog(xs, yh);
  fh.x_label = "count";
  fh.y_label = "l2_ratio_hilbert";
  fh.judge(theorem_exponent(cfg.dim), cfg.tolerance("slope"));
  run.fit(std::move(fh));
  FitReport fa = fit_loglog(xs, ya);
  fa.x_label = "count";
  fa.y_label = "l2_ratio_average";
  fa.judge(theorem_exponent(cfg.dim), cfg.tolerance("slope"));
  run.fit(std::move(fa));
}

// ---- certify-scaling ---------------------------------------------------------

void certify_scaling(Run& run) {
  const auto& cfg = run.cfg;
  run.res.table.header = {"delta", "seed", "count", "max_depth", "nominal_depth", "bound_M", "bound_T", "closure_ok"};
  RecursionConfig rc = RecursionConfig::with_scale(cfg.param("cover_scale"));
  rc.resolution_factor = cfg.param("resolution");
  rc.l_max = static_cast<int>(cfg.param("l_max"));
  std::vector<double> xs, depth, bm, bt;
  for (double d : cfg.deltas) {
    for (auto seed : cfg.seeds) {
      const DirectionSet net = build_maximal_net(cfg.dim, d, seed);
      const BoundTrace t = certify(net, rc);
      if (!audit(t)) throw NumericError("bound trace failed its audit at delta=" + fmt(d));
      const double nominal = std::log(2.0 / d) / std::log(rc.C);
      run.row({fmt(d), std::to_string(seed), std::to_string(net.size()), std::to_string(t.max_depth), fmt(nominal),
               fmt(t.bound_M), fmt(t.bound_T), t.closure_ok ? "1" : "0"});
      xs.push_back(1.0 / d);
      depth.push_back(nominal);
      bm.push_back(t.bound_M);
      bt.push_back(t.bound_T);
    }
  }
  if (cfg.dim == 2) {
    // Bounds grow like the recursion depth: judge linearity, not a power.
    FitReport f = fit_linear(depth, bt);
    f.x_label = "nominal_depth";
    f.y_label = "bound_T";
    f.tolerance = cfg.tolerance("r2");
    f.pass = f.r_squared >= f.tolerance;
    run.fit(std::move(f));
    return;
  }
  FitReport fm = fit_loglog(xs, bm);
  fm.x_label = "1/delta";
  fm.y_label = "bound_M";
  fm.judge((cfg.dim - 2.0) / 2.0, cfg.tolerance("slope"));
  run.fit(std::move(fm));
  FitReport ft = fit_loglog(xs, bt);
  ft.x_label = "1/delta";
  ft.y_label = "bound_T";
  ft.judge((cfg.dim - 2.0) / 2.0, cfg.tolerance("slope"));
  run.fit(std::move(ft));
}

// ---- multiplier-decay --------------------------------------------------------

Direction random_unit(int dim, Engine& eng) {
  std::normal_distribution<double> g;
  for (;;) {
    std::vector<double> x(dim);
    for (auto& c : x) c = g(eng);
    double n = 0;
    for (double c : x) n += c * c;
    if (n > 1e-12) return Direction::normalized(std::move(x));
  }
}

// A unit vector at distance `dist` from `center`.
Direction tilted(const Direction& center, double dist, Engine& eng) {
  const Direction u = orthogonal_component(random_unit(center.dim(), eng), center);
  // |cos a e + sin a u - e| = 2 sin(a/2).
  const double a = 2.0 * std::asin(std::min(1.0, dist / 2.0));
  std::vector<double> x(center.dim());
  for (int i = 0; i < center.dim(); ++i) x[i] = std::cos(a) * center[i] + std::sin(a) * u[i];
  return Direction::normalized(std::move(x));
}

void multiplier_decay(Run& run) {
  const auto& cfg = run.cfg;
  run.res.table.header = {"config", "seed", "delta_j", "l", "max_diff_imaginary_power", "bound", "max_diff_hilbert"};
  const double lo = cfg.deltas.back(), hi = cfg.deltas.front();
  const int l_max = static_cast<int>(cfg.param("l_max"));
  const double c = cfg.param("c");
  const MultiplierSpec m = MultiplierSpec::imaginary_power(cfg.param("alpha"));
  const MultiplierSpec h = MultiplierSpec::hilbert();
  FrequencySample sample;
  sample.polar_steps = static_cast<int>(cfg.param("polar_steps"));
  sample.azimuth_steps = static_cast<int>(cfg.param("azimuth_steps"));
  std::vector<double> xs, ys;
  for (std::size_t ci = 0; ci < cfg.seeds.size(); ++ci) {
    Engine eng = make_engine(cfg.seeds[ci], 0);
    const double dj = lo == hi ? lo : lo + (hi - lo) * uniform01(eng);
    const Direction vj = random_unit(cfg.dim, eng);
    const Direction v = tilted(vj, dj * (0.3 + 0.6 * uniform01(eng)), eng);
    if (saturation_level(dj, c) < l_max)
      throw ConfigError("delta_j=" + fmt(dj) + " saturates before l_max=" + std::to_string(l_max));
    double C = 0.0;
    for (int l = 1; l <= l_max; ++l) {
      const ConeSpec cone{vj, dj, c, l};
      const double diff = multiplier_difference_max(v, vj, m, cone, sample);
      const double dh = multiplier_difference_max(v, vj, h, cone, sample);
      if (l == 1) C = 2.0 * diff;
      const double bound = C * std::ldexp(1.0, -l) * (1 + cfg.tolerance("decay"));
      run.row({std::to_string(ci), std::to_string(cfg.seeds[ci]), fmt(dj), std::to_string(l), fmt(diff), fmt(bound),
               fmt(dh)});
      const std::string tag = " config=" + std::to_string(ci) + " l=" + std::to_string(l);
      if (l >= 2) run.check("decay" + tag, diff, bound, diff <= bound);
      run.check("hilbert zero" + tag, dh, cfg.tolerance("hilbert"), dh <= cfg.tolerance("hilbert"));
      if (diff > 0) {
        xs.push_back(std::ldexp(1.0, l));
        ys.push_back(diff);
      }
    }
  }
  FitReport f = fit_loglog(xs, ys);
  f.x_label = "2^l";
  f.y_label = "max_diff";
  f.judge(-1.0, cfg.tolerance("slope"));
  run.fit(std::move(f));
}

// ---- kernel-decay ------------------------------------------------------------

void kernel_decay(Run& run) {
  const auto& cfg = run.cfg;
  run.res.table.header = {"grid", "l", "max_ratio", "ratio_at_origin", "max_abs_kernel"};
  const int dim = cfg.dim;
  const double dj = cfg.deltas.front();
  const double c = cfg.param("c");
  const int k = static_cast<int>(cfg.param("band"));
  const int l_lo = static_cast<int>(cfg.param("l_min")), l_hi = static_cast<int>(cfg.param("l_max"));
  const Direction vj = Direction::axis(dim, dim - 1);
  std::vector<double> tilt(dim, 0.0);
  tilt[dim - 1] = 1.0;
  tilt[0] = cfg.param("offset") * dj;
  const Direction v = Direction::normalized(tilt);
  const MultiplierSpec m = MultiplierSpec::imaginary_power(cfg.param("alpha"));
  const int grids[2] = {cfg.grid, static_cast<int>(cfg.param("fine_grid"))};
  if (!is_power_of_two(grids[1]) || grids[1] <= grids[0]) throw ConfigError("fine_grid must be a larger power of two");
  std::map<int, std::vector<double>> ratio;  // grid -> per level
  for (int N : grids) {
    const KernelGrid kg{dim, N, cfg.param("box_length")};
    for (int l = l_lo; l <= l_hi; ++l) {
      const KernelReport r = kernel_decay_check(v, vj, m, ConeSpec{vj, dj, c, l}, k, kg);
      run.row({std::to_string(N), std::to_string(l), fmt(r.max_ratio), fmt(r.ratio_at_origin), fmt(r.max_abs_kernel)});
      if (r.zero_kernel || !std::isfinite(r.max_ratio) || r.max_ratio <= 0)
        throw NumericError("kernel vanished or is not finite at grid " + std::to_string(N) + " l=" + std::to_string(l));
      ratio[N].push_back(r.max_ratio);
    }
  }
  const double refine = cfg.tolerance("refine");
  for (int l = l_lo; l <= l_hi; ++l) {
    const double a = ratio[grids[0]][l - l_lo], b = ratio[grids[1]][l - l_lo];
    const double q = std::max(a / b, b / a);
    run.check("grid doubling l=" + std::to_string(l), q, refine, q <= refine);
  }
  const auto& fine = ratio[grids[1]];
  const double spread = *std::max_element(fine.begin(), fine.end()) / *std::min_element(fine.begin(), fine.end());
  run.check("level spread", spread, cfg.tolerance("level"), spread <= cfg.tolerance("level"));
}

// ---- mixed-corollary ---------------------------------------------------------

void mixed_corollary(Run& run) {
  const auto& cfg = run.cfg;
  run.res.table.header = {"per_cap", "count", "caps", "bound_M", "bound_T", "representatives_T"};
  const double d = cfg.deltas.front();
  RecursionConfig rc = RecursionConfig::with_scale(cfg.param("cover_scale"));
  const int counts[2] = {1, static_cast<int>(cfg.param("per_cap"))};
  double excess[2] = {0, 0};
  for (int i = 0; i < 2; ++i) {
    LacunaryTemplate tpl{cfg.param("ratio"), counts[i], cfg.param("cap_radius") * d};
    const MixedSet ms = build_mixed_set(cfg.dim, d, tpl, cfg.seeds.front());
    const auto caps = ms.cover.caps();
    // Lacunary stand-ins: ||M_cap|| <~ 1 and ||T_cap|| <~ 1 + sqrt(log #cap).
    std::vector<double> bm(caps.size(), 1.0), bt(caps.size());
    for (std::size_t j = 0; j < caps.size(); ++j)
      bt[j] = 1.0 + std::sqrt(std::log(std::max<double>(caps[j].size(), 2.0)));
    const BoundTrace t = certify_mixed(ms.omega, ms.cover, bm, bt, rc);
    const double reps = t.nodes[1].bound_T;
    excess[i] = t.bound_T - reps;
    run.row({std::to_string(counts[i]), std::to_string(ms.omega.size()), std::to_string(caps.size()), fmt(t.bound_M),
             fmt(t.bound_T), fmt(reps)});
  }
  const double ratio = excess[1] / excess[0];
  const double target = std::sqrt(std::log(static_cast<double>(counts[1])));
  const double rel = std::abs(ratio / target - 1.0);
  run.res.summary["cap_term_ratio"] = ratio;
  run.res.summary["cap_term_target"] = target;
  run.check("cap term ratio vs sqrt(log per_cap)", rel, cfg.tolerance("ratio"), rel <= cfg.tolerance("ratio"));
}

using Runner = void (*)(Run&);

Runner runner_for(const std::string& kind) {
  static const std::map<std::string, Runner> table{
      {"net-scaling", net_scaling},          {"el-scaling", el_scaling},
      {"sharpness", sharpness},              {"grid-maximal", grid_maximal},
      {"certify-scaling", certify_scaling},  {"multiplier-decay", multiplier_decay},
      {"kernel-decay", kernel_decay},        {"mixed-corollary", mixed_corollary}};
  const auto it = table.find(kind);
  if (it == table.end()) throw ConfigError("unknown experiment kind '" + kind + "'");
  return it->second;
}

bool needs_fit_points(const std::string& kind) {
  return kind == "net-scaling" || kind == "el-scaling" || kind == "sharpness" || kind == "grid-maximal" ||
         kind == "certify-scaling";
}

Json map_json(const Params& m) {
  Json j = Json::object();
  for (const auto& [k, v] : m) j[k] = v;
  return j;
}

Params merged(Params base, const Params& over) {
  for (const auto& [k, v] : over) base[k] = v;
  return base;
}

void finalize(Run& run) {
  auto& r = run.res;
  const auto& cfg = run.cfg;
  r.pass = r.failures.empty();
  Json checks = Json::array();
  for (const auto& c : run.checks) checks.push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"pass", c.pass}});
  Json fits = Json::array();
  for (const auto& f : r.fits) fits.push_back(to_json(f));
  Json s{{"kind", cfg.kind},
         {"dim", cfg.dim},
         {"deltas", cfg.deltas},
         {"seeds", cfg.seeds},
         {"grid", cfg.grid},
         {"params", map_json(merged(default_params(cfg.kind, cfg.dim), cfg.params))},
         {"tolerances", map_json(merged(default_tolerances(cfg.kind, cfg.dim), cfg.tolerances))},
         {"fits", fits},
         {"checks", checks},
         {"failures", r.failures},
         {"pass", r.pass}};
  for (auto& [k, v] : r.summary.items()) s[k] = v;
  r.summary = std::move(s);
}

std::string table_json(const CsvTable& t) {
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    Json o = Json::object();
    for (std::size_t i = 0; i < t.header.size() && i < row.size(); ++i) o[t.header[i]] = row[i];
    rows.push_back(std::move(o));
  }
  return rows.dump(2) + "\n";
}

std::string table_path(const ExperimentConfig& cfg) {
  return (std::filesystem::path(cfg.out_dir) / (cfg.kind + "." + cfg.format)).string();
}

void write_table(const ExperimentConfig& cfg, const CsvTable& t) {
  write_text(table_path(cfg), cfg.format == "json" ? table_json(t) : t.str());
}

}  // namespace

// ---- configuration -----------------------------------------------------------

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"net-scaling",     "el-scaling",       "sharpness",    "grid-maximal",
                                              "certify-scaling", "multiplier-decay", "kernel-decay", "mixed-corollary"};
  return kinds;
}

std::map<std::string, double> default_params(const std::string& kind, int dim) {
  if (kind == "net-scaling") return {{"coverage_resolution", 0.125}};
  if (kind == "el-scaling") return {{"cover_scale", 4.0}, {"c", 1.0}, {"resolution", 0.5}};
  if (kind == "sharpness")
    return {{"radial_nodes", 48}, {"inner_nodes", 16}, {"angular_points", 0}, {"single_direction", 0}};
  if (kind == "grid-maximal") return {{"box_length", 8.0}, {"radius", 1.0}, {"smoothing", 0.0}};
  if (kind == "certify-scaling")
    return {{"cover_scale", dim == 2 ? 5.0 : 4.0}, {"resolution", 0.25}, {"l_max", 12}};
  if (kind == "multiplier-decay")
    return {{"c", 1.0}, {"l_max", 6}, {"alpha", 1.0}, {"polar_steps", 400}, {"azimuth_steps", 256}};
  if (kind == "kernel-decay")
    return {{"box_length", 8.0 * std::numbers::pi}, {"band", 2}, {"c", 1.0}, {"l_min", 1}, {"l_max", 4},
            {"offset", 0.8}, {"alpha", 1.0}, {"fine_grid", 128}};
  if (kind == "mixed-corollary") return {{"cover_scale", 4.0}, {"per_cap", 16}, {"ratio", 0.5}, {"cap_radius", 0.4}};
  throw ConfigError("unknown experiment kind '" + kind + "'");
}

std::map<std::string, double> default_tolerances(const std::string& kind, int dim) {
  if (kind == "net-scaling") return {{"slope", 0.15}, {"covering", 1e-9}};
  if (kind == "el-scaling") return {{"e0_slope", 0.25}, {"sigma_slope", 0.2}, {"gap", 2.0}};
  if (kind == "sharpness") return {{"slope", dim == 3 ? 0.07 : 0.08}, {"convergence", 0.05}};
  if (kind == "grid-maximal") return {{"slope", 0.15}, {"trivial", 1e-9}};
  if (kind == "certify-scaling") return {{"slope", 0.15}, {"r2", 0.98}};
  if (kind == "multiplier-decay") return {{"decay", 0.0}, {"hilbert", 0.0}, {"slope", 0.5}};
  if (kind == "kernel-decay") return {{"refine", 2.0}, {"level", 4.0}};
  if (kind == "mixed-corollary") return {{"ratio", 0.25}};
  throw ConfigError("unknown experiment kind '" + kind + "'");
}

ExperimentConfig default_experiment(const std::string& kind, int dim) {
  ExperimentConfig c;
  c.kind = kind;
  c.dim = dim;
  if (kind == "net-scaling") {
    c.deltas = dim >= 4 ? std::vector<double>{0.5, 0.4, 0.3, 0.25} : std::vector<double>{0.4, 0.3, 0.2, 0.15, 0.1};
    c.seeds = {1, 2, 3};
  } else if (kind == "el-scaling") {
    c.deltas = {0.0625, 0.03125, 0.015625, 0.0078125};
  } else if (kind == "sharpness") {
    c.deltas = dim == 3 ? std::vector<double>{0.4, 0.3, 0.2, 0.15, 0.1} : std::vector<double>{0.4, 0.3, 0.25, 0.2, 0.15};
    c.seeds = {1, 2, 3};
  } else if (kind == "grid-maximal") {
    c.deltas = {0.8, 0.6, 0.45, 0.35};
    c.grid = 32;
  } else if (kind == "certify-scaling") {
    if (dim == 2) {
      c.deltas.clear();
      for (int k = 4; k <= 12; ++k) c.deltas.push_back(std::ldexp(1.0, -k));
    } else {
      c.deltas = {0.0625, 0.03125, 0.015625, 0.0078125};
    }
  } else if (kind == "multiplier-decay") {
    c.deltas = {0.012, 0.006};
    c.seeds = {1, 2, 3};
  } else if (kind == "kernel-decay") {
    c.deltas = {0.05};
    c.grid = 64;
  } else if (kind == "mixed-corollary") {
    c.deltas = {0.1};
  } else {
    throw ConfigError("unknown experiment kind '" + kind + "'");
  }
  return c;
}

void ExperimentConfig::validate() const {
  runner_for(kind);
  if (dim < 2 || dim > 8) throw ConfigError("dim must be in [2, 8]");
  if (deltas.empty()) throw ConfigError("delta list is empty");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0 && deltas[i] < 1.0)) throw ConfigError("delta values must lie in (0, 1)");
    if (i > 0 && !(deltas[i] < deltas[i - 1])) throw ConfigError("delta values must be strictly decreasing");
  }
  if (seeds.empty()) throw ConfigError("seed list is empty");
  if (!is_power_of_two(grid)) throw ConfigError("grid size must be a power of two");
  if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
  if (out_dir.empty()) throw ConfigError("output directory is empty");
  const auto p = default_params(kind, dim);
  for (const auto& [k, v] : params) {
    if (!p.count(k)) throw ConfigError("unknown parameter '" + k + "' for " + kind);
    if (!std::isfinite(v)) throw ConfigError("parameter '" + k + "' is not finite");
  }
  const auto t = default_tolerances(kind, dim);
  for (const auto& [k, v] : tolerances) {
    if (!t.count(k)) throw ConfigError("unknown tolerance '" + k + "' for " + kind);
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("tolerance '" + k + "' must be finite and >= 0");
  }
  if (needs_fit_points(kind) && deltas.size() * seeds.size() < 3) throw ConfigError(kind + " needs >= 3 data points");
  if (kind == "sharpness" && dim < 3) throw ConfigError("sharpness needs dim >= 3");
  if (kind == "el-scaling" && dim < 3) throw ConfigError("el-scaling needs dim >= 3");
  if (kind == "multiplier-decay" && deltas.size() > 2) throw ConfigError("multiplier-decay takes a delta_j range (<= 2 values)");
}

double ExperimentConfig::param(const std::string& name) const {
  if (auto it = params.find(name); it != params.end()) return it->second;
  const auto d = default_params(kind, dim);
  if (auto it = d.find(name); it != d.end()) return it->second;
  throw ConfigError("unknown parameter '" + name + "'");
}

double ExperimentConfig::tolerance(const std::string& name) const {
  if (auto it = tolerances.find(name); it != tolerances.end()) return it->second;
  const auto d = default_tolerances(kind, dim);
  if (auto it = d.find(name); it != d.end()) return it->second;
  throw ConfigError("unknown tolerance '" + name + "'");
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig c;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "kind") {
      c.kind = val;
    } else if (key == "dim") {
      c.dim = parse_int(key, val);
    } else if (key == "deltas") {
      c.deltas.clear();
      for (const auto& s : split_list(val)) c.deltas.push_back(parse_number(key, s));
    } else if (key == "seeds") {
      c.seeds.clear();
      for (const auto& s : split_list(val)) c.seeds.push_back(parse_seed(s));
    } else if (key == "grid") {
      c.grid = parse_int(key, val);
    } else if (key == "out_dir") {
      c.out_dir = val;
    } else if (key == "format") {
      c.format = val;
    } else if (key.rfind("param.", 0) == 0 && key.size() > 6) {
      c.params[key.substr(6)] = parse_number(key, val);
    } else if (key.rfind("tol.", 0) == 0 && key.size() > 4) {
      c.tolerances[key.substr(4)] = parse_number(key, val);
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return c;
}

std::string ExperimentConfig::emit() const {
  std::ostringstream o;
  o << "kind = " << kind << "\n";
  o << "dim = " << dim << "\n";
  o << "deltas = ";
  for (std::size_t i = 0; i < deltas.size(); ++i) o << (i ? ", " : "") << format_double(deltas[i]);
  o << "\nseeds = ";
  for (std::size_t i = 0; i < seeds.size(); ++i) o << (i ? ", " : "") << seeds[i];
  o << "\ngrid = " << grid << "\n";
  o << "out_dir = " << out_dir << "\n";
  o << "format = " << format << "\n";
  for (const auto& [k, v] : params) o << "param." << k << " = " << format_double(v) << "\n";
  for (const auto& [k, v] : tolerances) o << "tol." << k << " = " << format_double(v) << "\n";
  return o.str();
}

// ---- running -----------------------------------------------------------------

ExperimentResult compute_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  Run run(cfg);
  runner_for(cfg.kind)(run);
  finalize(run);
  return std::move(run.res);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);
  Run run(cfg);
  const std::string ctx = "experiment " + cfg.kind + ": ";
  const auto flush_failure = [&](const std::string& msg) {
    write_table(cfg, run.res.table);
    write_text((std::filesystem::path(cfg.out_dir) / (cfg.kind + ".failed")).string(),
               "error: " + msg + "\n" + cfg.emit());
  };
  try {
    runner_for(cfg.kind)(run);
  } catch (const ConfigError& e) {
    flush_failure(e.what());
    throw ConfigError(ctx + e.what());
  } catch (const NumericError& e) {
    flush_failure(e.what());
    throw NumericError(ctx + e.what());
  } catch (const std::invalid_argument& e) {
    flush_failure(e.what());
    throw std::invalid_argument(ctx + e.what());
  } catch (const std::exception& e) {
    flush_failure(e.what());
    throw std::runtime_error(ctx + e.what());
  }
  finalize(run);
  const std::string summary = (std::filesystem::path(cfg.out_dir) / (cfg.kind + ".summary.json")).string();
  write_table(cfg, run.res.table);
  write_text(summary, run.res.summary.dump(2) + "\n");
  const auto stale = std::filesystem::path(cfg.out_dir) / (cfg.kind + ".failed");
  std::filesystem::remove(stale);
  run.res.artifacts = {table_path(cfg), summary};
  return std::move(run.res);
}

// ---- selftest ----------------------------------------------------------------

bool run_selftest(std::ostream& out) {
  bool all = true;
  const auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    out << (ok ? "PASS " : "FAIL ") << name << " (" << detail << ")\n";
    all = all && ok;
  };
  const auto guarded = [&](const std::string& name, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(name, false, std::string("threw: ") + e.what());
    }
  };

  guarded("dft round trip", [&] {
    const GridField f = random_band_limited_field(3, 16, 2 * std::numbers::pi, 4, 11);
    const GridField g = inverse_dft(forward_dft(f), f);
    const double err = max_abs_difference(f, g);
    report("dft round trip", err < 1e-12, "max error " + fmt(err));
  });
  guarded("plancherel under unimodular multiplier", [&] {
    const GridField f = random_band_limited_field(3, 16, 2 * std::numbers::pi, 4, 12);
    const Direction v = Direction::normalized({1.0, 2.0, 2.0});
    const GridField g = apply_multiplier(f, singular_symbol(v, MultiplierSpec::imaginary_power(1.0)));
    const double rel = std::abs(g.l2_norm() - f.l2_norm()) / f.l2_norm();
    report("plancherel under unimodular multiplier", rel < 1e-10, "relative error " + fmt(rel));
  });
  guarded("net invariants", [&] {
    const DirectionSet net = build_maximal_net(3, 0.3, 5);
    const double cover = sampled_covering_radius(net, 0.03, 5, 100'000);
    report("net invariants", satisfies_invariants(net) && cover <= 0.3,
           std::to_string(net.size()) + " points, covering radius " + fmt(cover));
  });
  guarded("ball oracle at x = 2v", [&] {
    const Direction v = Direction::axis(3, 2);
    const double x[3] = {0.0, 0.0, 2.0};
    const double a = ball_oracle_average(x, v), h = ball_oracle_hilbert(x, v);
    const double ha = std::log(3.0) / std::numbers::pi;
    report("ball oracle at x = 2v", std::abs(a - 1.0 / 3.0) < 1e-14 && std::abs(std::abs(h) - ha) < 1e-14,
           "average " + fmt(a) + ", hilbert " + fmt(h));
  });
  guarded("E_l bracket ordering", [&] {
    const DirectionSet net = build_maximal_net(3, 0.2, 3);
    const CapCover cover = build_cap_cover(net, 0.4);
    const auto br = bracket_El_range(cover, saturation_level(cover), 0.05);
    bool ok = true;
    for (std::size_t l = 0; l < br.size(); ++l) {
      ok = ok && br[l].lower <= br[l].upper && count_at(br[l].witness_w, cover, static_cast<int>(l)) == br[l].lower;
      if (l > 0) ok = ok && br[l].lower >= br[l - 1].lower;
    }
    ok = ok && br.back().lower == static_cast<int>(cover.cap_count());
    report("E_l bracket ordering", ok, std::to_string(br.size()) + " levels");
  });
  guarded("certifier audit", [&] {
    const DirectionSet net = build_maximal_net(3, 0.1, 4);
    const BoundTrace t = certify(net, RecursionConfig::with_scale(4.0));
    report("certifier audit", audit(t) && t.bound_M > 0 && t.bound_T > 0,
           "M " + fmt(t.bound_M) + ", T " + fmt(t.bound_T));
  });
  guarded("config round trip", [&] {
    ExperimentConfig c = default_experiment("sharpness", 3);
    c.tolerances["slope"] = 0.1;
    c.params["radial_nodes"] = 40;
    report("config round trip", ExperimentConfig::parse(c.emit()) == c, "sharpness defaults");
  });
  return all;
}

}  // namespace dirmax
