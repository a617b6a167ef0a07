// dirmax: command-line front end for direction nets, cone counts, directional
// operators, maximal functions, bound certification and scaling experiments.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "dirmax/certifier.hpp"
#include "dirmax/cone_counts.hpp"
#include "dirmax/error.hpp"
#include "dirmax/experiment.hpp"
#include "dirmax/field_ops.hpp"
#include "dirmax/io.hpp"
#include "dirmax/maximal_ops.hpp"
#include "dirmax/parallel.hpp"
#include "dirmax/sphere_nets.hpp"

using namespace dirmax;

namespace {

enum Exit { kPass = 0, kToleranceFail = 1, kConfigError = 2, kNumericError = 3 };

struct Globals {
  int threads = 0;
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::string out_dir = ".";
  bool out_dir_given = false;
  std::string format = "csv";
  bool format_given = false;
};

// An explicit --out path, or <out-dir>/<fallback>.
std::string target(const Globals& g, const std::string& out, const std::string& fallback) {
  if (!out.empty()) {
    const auto parent = std::filesystem::path(out).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    return out;
  }
  std::filesystem::create_directories(g.out_dir);
  return (std::filesystem::path(g.out_dir) / fallback).string();
}

void print(const Globals& g, const CsvTable& table, const Json& json) {
  if (g.format == "json")
    std::cout << json.dump(2) << "\n";
  else
    std::cout << table.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> parse_doubles(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& s : items) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(s, &used));
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + s + "'");
    }
  }
  return out;
}

Direction parse_direction(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(item);
  try {
    return Direction::normalized(parse_doubles(items));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad direction: ") + e.what());
  }
}

// A direction set from --net, or a fresh maximal net from --dim/--delta.
struct SetSource {
  std::string path;
  int dim = 3;
  double delta = 0.2;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--net", path, "direction file (otherwise a maximal net is built)");
    cmd->add_option("--dim", dim, "dimension of the generated net")->check(CLI::Range(2, 8));
    cmd->add_option("--delta", delta, "separation of the generated net");
  }
  DirectionSet load(std::uint64_t seed) const {
    if (!path.empty()) return read_directions(path);
    if (!(delta > 0.0 && delta < 2.0)) throw ConfigError("--delta must lie in (0, 2)");
    return build_maximal_net(dim, delta, seed);
  }
};

// ---- verbs -------------------------------------------------------------------

struct NetArgs {
  int dim = 3;
  double delta = 0.2;
  std::string out;
  std::vector<std::string> lacunary;
};

int cmd_net(const Globals& g, const NetArgs& a) {
  DirectionSet set;
  if (!a.lacunary.empty()) {
    // count, ratio, radius around e_n with tangent e_1.
    const auto p = parse_doubles(a.lacunary);
    if (p.size() != 3) throw ConfigError("--lacunary expects count,ratio,radius");
    LacunarySpec spec{Direction::axis(a.dim, a.dim - 1), Direction::axis(a.dim, 0), p[1], static_cast<int>(p[0]), p[2]};
    set = build_lacunary(spec);
  } else {
    if (!(a.delta > 0.0 && a.delta < 2.0)) throw ConfigError("--delta must lie in (0, 2)");
    set = build_maximal_net(a.dim, a.delta, g.seed);
  }
  const std::string path = target(g, a.out, "net.tsv");
  write_directions(path, set);
  const double sep = set.size() > 1 ? min_pairwise_distance(set) : 2.0;
  CsvTable t{{"dim", "delta", "count", "min_separation", "file"},
             {{std::to_string(a.dim), format_double(set.separation), std::to_string(set.size()), format_double(sep),
               path}}};
  print(g, t, Json{{"dim", a.dim}, {"delta", set.separation}, {"count", set.size()}, {"min_separation", sep},
                   {"file", path}});
  return satisfies_invariants(set) ? kPass : kNumericError;
}

struct ElArgs {
  SetSource src;
  double scale = 0.0, c = 1.0, resolution = 0.0;
  int lmax = -1;
  std::string out;
};

int cmd_el(const Globals& g, const ElArgs& a) {
  const DirectionSet set = a.src.load(g.seed);
  const double scale = a.scale > 0 ? a.scale : 4.0 * set.separation;
  const CapCover cover = build_cap_cover(set, scale, a.c);
  const int sat = saturation_level(cover);
  const int top = a.lmax < 0 ? sat : std::min(a.lmax, sat);
  const double rho = a.resolution > 0 ? a.resolution : default_resolution(cover);
  const auto br = bracket_El_range(cover, top, rho);
  CsvTable t{{"l", "lower", "upper", "caps", "resolution"}, {}};
  Json rows = Json::array();
  for (const auto& b : br) {
    t.rows.push_back({std::to_string(b.l), std::to_string(b.lower), std::to_string(b.upper),
                      std::to_string(cover.cap_count()), format_double(b.sample_resolution)});
    rows.push_back(to_json(b));
  }
  const Json report{{"count", set.size()}, {"scale", scale}, {"c", a.c}, {"caps", cover.cap_count()},
                    {"saturation", sat}, {"brackets", rows}};
  write_text(target(g, a.out, "el.json"), report.dump(2) + "\n");
  print(g, t, report);
  return kPass;
}

struct ApplyArgs {
  std::string field, out, op = "sing", multiplier = "hilbert", direction, net;
  std::size_t index = 0;
  double h = 1.0, alpha = 1.0, delta = 0.1, c = 1.0;
  int l = 0, k = 0;
};

int cmd_apply(const Globals& g, const ApplyArgs& a) {
  const GridField f = read_field(a.field);
  const auto dir = [&] {
    Direction v = Direction::axis(f.dim(), f.dim() - 1);
    if (!a.net.empty()) {
      const DirectionSet set = read_directions(a.net);
      if (a.index >= set.size()) throw ConfigError("--index beyond the direction file");
      v = set.points[a.index];
    } else if (!a.direction.empty()) {
      v = parse_direction(a.direction);
    }
    if (v.dim() != f.dim()) throw ConfigError("direction dimension does not match the field");
    return v;
  };
  GridField out;
  if (a.op == "avg") {
    if (!(a.h > 0)) throw ConfigError("--scale must be positive");
    out = directional_average(f, dir(), a.h);
  } else if (a.op == "sing") {
    const MultiplierSpec m =
        a.multiplier == "hilbert" ? MultiplierSpec::hilbert() : MultiplierSpec::imaginary_power(a.alpha);
    out = directional_singular(f, dir(), m);
  } else if (a.op == "cone") {
    ConeSpec cone{dir(), a.delta, a.c, a.l};
    try {
      cone.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    out = cone_restrict(f, cone);
  } else {
    out = littlewood_paley(f, a.k);
  }
  const std::string path = target(g, a.out, a.op + ".field");
  write_field(path, out);
  const double in_norm = f.l2_norm(), out_norm = out.l2_norm();
  CsvTable t{{"op", "l2_in", "l2_out", "max_abs_imag", "file"},
             {{a.op, format_double(in_norm), format_double(out_norm), format_double(out.max_abs_imag()), path}}};
  print(g, t, Json{{"op", a.op}, {"l2_in", in_norm}, {"l2_out", out_norm}, {"max_abs_imag", out.max_abs_imag()},
                   {"file", path}});
  return kPass;
}

struct MaxopArgs {
  SetSource src;
  std::string field, out, field_out, kind = "hilbert", multiplier = "imaginary-power";
  double alpha = 1.0, delta = 0.1;
  bool refine = false;
};

int cmd_maxop(const Globals& g, const MaxopArgs& a) {
  const GridField f = read_field(a.field);
  MaximalReport rep;
  bool guard_ok = true;
  double guard = 0.0;
  if (a.kind == "avg" || a.kind == "sing" || a.kind == "hilbert" || a.kind == "single") {
    const DirectionSet set = a.src.load(g.seed);
    if (set.dim != f.dim()) throw ConfigError("direction set dimension does not match the field");
    if (a.kind == "avg") {
      ScaleGrid scales = ScaleGrid::for_grid(f);
      if (a.refine) scales = scales.refined();
      rep = maximal_average(f, set, scales);
    } else if (a.kind == "single") {
      rep = single_scale_maximal(f, set);
    } else {
      const MultiplierSpec m = a.kind == "hilbert" || a.multiplier == "hilbert" ? MultiplierSpec::hilbert()
                                                                              : MultiplierSpec::imaginary_power(a.alpha);
      rep = maximal_singular(f, set, m);
      guard = std::sqrt(static_cast<double>(set.size())) * m.sup_norm;
      guard_ok = rep.l2_ratio <= guard * (1 + 1e-9);
    }
  } else {
    std::vector<int> axes(f.dim());
    for (int i = 0; i < f.dim(); ++i) axes[i] = i;
    rep.operator_id = a.kind;
    rep.input_id = a.field;
    if (a.kind == "nikodym") rep.output = nikodym_maximal(f, Direction::axis(f.dim(), f.dim() - 1), a.delta,
                                                          ScaleGrid::for_grid(f));
    else if (a.kind == "hl") rep.output = hardy_littlewood(f, axes);
    else rep.output = strong_maximal(f, axes);
    rep.l2_ratio = rep.output.l2_norm() / f.l2_norm();
  }
  Json j = to_json(rep);
  if (guard > 0) {
    j["trivial_bound"] = guard;
    j["trivial_bound_ok"] = guard_ok;
  }
  if (!a.field_out.empty()) {
    write_field(target(g, a.field_out, ""), rep.output);
    j["field"] = a.field_out;
  }
  const std::string path = target(g, a.out, "maxop.json");
  write_text(path, j.dump(2) + "\n");
  CsvTable t{{"operator", "l2_ratio", "trivial_bound", "report"},
             {{rep.operator_id, format_double(rep.l2_ratio), guard > 0 ? format_double(guard) : "", path}}};
  print(g, t, j);
  if (!guard_ok) {
    std::cerr << "trivial bound violated: " << format_double(rep.l2_ratio) << " > " << format_double(guard) << "\n";
    return kToleranceFail;
  }
  return kPass;
}

struct FieldArgs {
  std::string kind = "ball", out;
  int dim = 3, grid = 32, band = 4;
  double box = 8.0, radius = 1.0, smoothing = 0.0;
};

int cmd_field(const Globals& g, const FieldArgs& a) {
  if (a.grid < 2 || (a.grid & (a.grid - 1)) != 0) throw ConfigError("--grid must be a power of two");
  GridField f = a.kind == "random" ? random_band_limited_field(a.dim, a.grid, a.box, a.band, g.seed)
                                   : ball_indicator_field(a.dim, a.grid, a.box, a.radius, a.smoothing);
  const std::string path = target(g, a.out, a.kind + ".field");
  write_field(path, f);
  CsvTable t{{"kind", "dim", "grid", "box_length", "l2", "file"},
             {{a.kind, std::to_string(a.dim), std::to_string(a.grid), format_double(a.box), format_double(f.l2_norm()),
               path}}};
  print(g, t, Json{{"kind", a.kind}, {"dim", a.dim}, {"grid", a.grid}, {"box_length", a.box}, {"l2", f.l2_norm()},
                   {"file", path}});
  return kPass;
}

struct CertifyArgs {
  SetSource src;
  std::string kind = "T", out;
  double C = 4.0, c = 1.0, cap_radius = 0.4, ratio = 0.5;
  int lmax = 12, per_cap = 16;
};

int cmd_certify(const Globals& g, const CertifyArgs& a) {
  RecursionConfig cfg = RecursionConfig::with_scale(a.C);
  cfg.c = a.c;
  cfg.l_max = a.lmax;
  BoundTrace t;
  if (a.kind == "mixed") {
    // One lacunary sequence per cap of a delta-net; lacunary stand-ins for the cap bounds.
    const MixedSet ms = build_mixed_set(a.src.dim, a.src.delta, LacunaryTemplate{a.ratio, a.per_cap,
                                                                                 a.cap_radius * a.src.delta},
                                        g.seed);
    const auto caps = ms.cover.caps();
    std::vector<double> bm(caps.size(), 1.0), bt(caps.size());
    for (std::size_t j = 0; j < caps.size(); ++j)
      bt[j] = 1.0 + std::sqrt(std::log(std::max<double>(caps[j].size(), 2.0)));
    t = certify_mixed(ms.omega, ms.cover, bm, bt, cfg);
  } else {
    t = certify(a.src.load(g.seed), cfg);
    if (!audit(t)) throw NumericError("bound trace failed its audit");
  }
  const std::string path = target(g, a.out, "trace.json");
  write_text(path, to_json(t).dump(2) + "\n");
  CsvTable table{{"node", "role", "parent", "depth", "size", "delta", "eta", "leaf", "sigma_upper", "bound_M", "bound_T"},
                 {}};
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const auto& n = t.nodes[i];
    table.rows.push_back({std::to_string(i), node_role_name(n.role), std::to_string(n.parent), std::to_string(n.depth),
                          std::to_string(n.size), format_double(n.delta), format_double(n.eta), n.leaf ? "1" : "0",
                          format_double(n.sigma_upper), format_double(n.bound_M), format_double(n.bound_T)});
  }
  print(g, table, to_json(t));
  std::cerr << "bound_" << (a.kind == "M" ? "M " + format_double(t.bound_M) : "T " + format_double(t.bound_T))
            << " depth " << t.max_depth << " contraction " << format_double(t.contraction)
            << (t.closure_ok ? "" : " (induction does not close for this C)") << "\n";
  return t.closure_ok ? kPass : kToleranceFail;
}

int finish_experiment(const Globals& g, ExperimentConfig cfg, const std::string& table_copy = "") {
  if (g.seed_given) cfg.seeds = {g.seed};
  if (g.out_dir_given) cfg.out_dir = g.out_dir;
  if (g.format_given) cfg.format = g.format;
  const ExperimentResult r = run_experiment(cfg);
  if (!table_copy.empty()) write_text(target(g, table_copy, ""), r.table.str());
  for (const auto& f : r.fits) {
    std::cerr << f.y_label << " vs " << f.x_label << ": slope " << format_double(f.slope);
    if (f.target) std::cerr << " (target " << format_double(*f.target) << " +- " << format_double(f.tolerance) << ")";
    std::cerr << " r^2 " << format_double(f.r_squared) << (f.pass ? " PASS" : " FAIL") << "\n";
  }
  for (const auto& msg : r.failures) std::cerr << "FAIL " << msg << "\n";
  std::cout << (cfg.format == "json" ? r.summary.dump(2) + "\n" : r.table.str());
  std::cerr << "artifacts:";
  for (const auto& a : r.artifacts) std::cerr << " " << a;
  std::cerr << "\n" << (r.pass ? "PASS " : "FAIL ") << r.kind << "\n";
  return r.pass ? kPass : kToleranceFail;
}

void apply_pairs(const std::vector<std::string>& pairs, std::map<std::string, double>& into) {
  for (const auto& p : pairs) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw ConfigError("expected name=value, got '" + p + "'");
    into[p.substr(0, eq)] = parse_doubles({p.substr(eq + 1)}).front();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Direction-set maximal operators: nets, cone counts, multipliers and bound certificates"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--threads", g.threads, "worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
  auto* seed_opt = app.add_option("--seed", g.seed, "base random seed");
  auto* out_opt = app.add_option("--out-dir", g.out_dir, "directory for artifacts");
  auto* fmt_opt = app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"csv", "json"}));

  auto* net = app.add_subcommand("net", "build a maximal delta-net (or a lacunary sequence) and write it");
  NetArgs na;
  net->add_option("--dim", na.dim)->check(CLI::Range(2, 8));
  net->add_option("--delta", na.delta);
  net->add_option("--out", na.out, "direction file to write");
  net->add_option("--lacunary", na.lacunary, "count,ratio,radius: lacunary sequence near e_n instead")
      ->delimiter(',');

  auto* el = app.add_subcommand("el", "bracket the cone counts E_l of a cap cover");
  ElArgs ea;
  ea.src.add_to(el);
  el->add_option("--scale", ea.scale, "cap diameter (default 4 x separation)");
  el->add_option("--c", ea.c, "hyperplane slack in (0, 1]");
  el->add_option("--lmax", ea.lmax, "largest level (default: saturation)");
  el->add_option("--resolution", ea.resolution, "sample resolution (default: smallest diameter / 16)");
  el->add_option("--out", ea.out, "JSON report");

  auto* apply = app.add_subcommand("apply", "apply a directional operator to a field file");
  ApplyArgs aa;
  apply->add_option("--field", aa.field, "input field file")->required();
  apply->add_option("--op", aa.op)->check(CLI::IsMember({"avg", "sing", "cone", "lp"}));
  apply->add_option("--net", aa.net, "direction file; --index picks the direction");
  apply->add_option("--index", aa.index);
  apply->add_option("--direction", aa.direction, "comma separated components (default e_n)");
  apply->add_option("--multiplier", aa.multiplier)->check(CLI::IsMember({"hilbert", "imaginary-power"}));
  apply->add_option("--alpha", aa.alpha, "exponent of |s|^{i alpha}");
  apply->add_option("--scale", aa.h, "averaging scale h");
  apply->add_option("--delta", aa.delta, "cone aperture delta_j");
  apply->add_option("--c", aa.c, "cone slack");
  apply->add_option("--l", aa.l, "cone shell index");
  apply->add_option("--k", aa.k, "Littlewood-Paley level");
  apply->add_option("--out", aa.out, "output field file");

  auto* maxop = app.add_subcommand("maxop", "apply a maximal operator to a field file");
  MaxopArgs ma;
  ma.src.add_to(maxop);
  maxop->add_option("--kind", ma.kind)
      ->check(CLI::IsMember({"avg", "sing", "hilbert", "single", "nikodym", "hl", "strong"}));
  maxop->add_option("--field", ma.field, "input field file")->required();
  maxop->add_option("--multiplier", ma.multiplier, "symbol for --kind sing")
      ->check(CLI::IsMember({"hilbert", "imaginary-power"}));
  maxop->add_option("--alpha", ma.alpha);
  maxop->add_option("--nikodym-delta", ma.delta, "rectangle eccentricity (direction e_n)");
  maxop->add_flag("--refine", ma.refine, "ratio-sqrt(2) scale grid for --kind avg");
  maxop->add_option("--out", ma.out, "JSON report");
  maxop->add_option("--field-out", ma.field_out, "write the maximal field here");

  auto* field = app.add_subcommand("field", "write a test field");
  FieldArgs fa;
  field->add_option("--kind", fa.kind)->check(CLI::IsMember({"ball", "random"}));
  field->add_option("--dim", fa.dim)->check(CLI::Range(1, 6));
  field->add_option("--grid", fa.grid);
  field->add_option("--box", fa.box)->check(CLI::PositiveNumber);
  field->add_option("--band", fa.band);
  field->add_option("--radius", fa.radius);
  field->add_option("--smoothing", fa.smoothing);
  field->add_option("--out", fa.out);

  auto* sharp = app.add_subcommand("sharpness", "ball-oracle sharpness scan");
  int sh_dim = 3;
  std::vector<std::string> sh_deltas;
  std::vector<std::uint64_t> sh_seeds;
  std::string sh_out;
  sharp->add_option("--dim", sh_dim)->check(CLI::Range(3, 8));
  sharp->add_option("--deltas", sh_deltas)->delimiter(',');
  sharp->add_option("--seeds", sh_seeds)->delimiter(',');
  sharp->add_option("--out", sh_out, "copy of the scan table");

  auto* cert = app.add_subcommand("certify", "certify M and T bounds by the cap recursion");
  CertifyArgs ca;
  ca.src.add_to(cert);
  cert->add_option("--kind", ca.kind)->check(CLI::IsMember({"M", "T", "mixed"}));
  cert->add_option("--C", ca.C, "cover scale multiplier >= 2");
  cert->add_option("--c", ca.c, "hyperplane slack");
  cert->add_option("--lmax", ca.lmax);
  cert->add_option("--per-cap", ca.per_cap, "lacunary points per cap (--kind mixed)");
  cert->add_option("--cap-radius", ca.cap_radius, "lacunary cap radius relative to delta (--kind mixed)");
  cert->add_option("--ratio", ca.ratio, "lacunary ratio (--kind mixed)");
  cert->add_option("--out", ca.out, "trace JSON");

  auto* exp = app.add_subcommand("experiment", "run a scaling experiment and judge it");
  std::string ex_kind, ex_config;
  int ex_dim = 0, ex_grid = 0;
  std::vector<std::string> ex_deltas, ex_params, ex_tols;
  std::vector<std::uint64_t> ex_seeds;
  bool ex_emit = false;
  exp->add_option("kind", ex_kind, "experiment kind")->check(CLI::IsMember(experiment_kinds()));
  exp->add_option("--config", ex_config, "key = value configuration file");
  exp->add_option("--dim", ex_dim);
  exp->add_option("--grid", ex_grid);
  exp->add_option("--deltas", ex_deltas)->delimiter(',');
  exp->add_option("--seeds", ex_seeds)->delimiter(',');
  exp->add_option("--param", ex_params, "name=value parameter override");
  exp->add_option("--tol", ex_tols, "name=value tolerance override");
  exp->add_flag("--print-config", ex_emit, "print the effective configuration and exit");

  auto* self = app.add_subcommand("selftest", "quick internal consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kConfigError;
  }
  g.seed_given = seed_opt->count() > 0;
  g.out_dir_given = out_opt->count() > 0;
  g.format_given = fmt_opt->count() > 0;
  set_thread_count(g.threads > 0 ? g.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));

  try {
    if (net->parsed()) return cmd_net(g, na);
    if (el->parsed()) return cmd_el(g, ea);
    if (apply->parsed()) return cmd_apply(g, aa);
    if (maxop->parsed()) return cmd_maxop(g, ma);
    if (field->parsed()) return cmd_field(g, fa);
    if (cert->parsed()) return cmd_certify(g, ca);
    if (sharp->parsed()) {
      ExperimentConfig cfg = default_experiment("sharpness", sh_dim);
      if (!sh_deltas.empty()) cfg.deltas = parse_doubles(sh_deltas);
      if (!sh_seeds.empty()) cfg.seeds = sh_seeds;
      return finish_experiment(g, cfg, sh_out);
    }
    if (exp->parsed()) {
      ExperimentConfig cfg;
      if (!ex_config.empty()) {
        cfg = ExperimentConfig::parse(read_file(ex_config));
        if (!ex_kind.empty() && ex_kind != cfg.kind) throw ConfigError("kind differs from the configuration file");
      } else {
        if (ex_kind.empty()) throw ConfigError("experiment kind or --config required");
        cfg = default_experiment(ex_kind, ex_dim > 0 ? ex_dim : 3);
      }
      if (ex_dim > 0) cfg.dim = ex_dim;
      if (ex_grid > 0) cfg.grid = ex_grid;
      if (!ex_deltas.empty()) cfg.deltas = parse_doubles(ex_deltas);
      if (!ex_seeds.empty()) cfg.seeds = ex_seeds;
      apply_pairs(ex_params, cfg.params);
      apply_pairs(ex_tols, cfg.tolerances);
      if (ex_emit) {
        if (g.seed_given) cfg.seeds = {g.seed};
        if (g.out_dir_given) cfg.out_dir = g.out_dir;
        if (g.format_given) cfg.format = g.format;
        cfg.validate();
        std::cout << cfg.emit();
        return kPass;
      }
      return finish_experiment(g, cfg);
    }
    if (self->parsed()) return run_selftest(std::cout) ? kPass : kToleranceFail;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumericError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumericError;
  }
  return kConfigError;
}
