#include "dirmax/io.hpp"

#include <bit>
#include <cinttypes>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "dirmax/error.hpp"

namespace dirmax {

namespace {

static_assert(std::endian::native == std::endian::little, "field files assume a little-endian host");

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& what) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + ": '" + s + "'");
  }
  if (pos != s.size()) throw ConfigError("cannot parse " + what + ": '" + s + "'");
  return v;
}

long long parse_int(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  long long v;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + ": '" + s + "'");
  }
  if (pos != s.size()) throw ConfigError("cannot parse " + what + ": '" + s + "'");
  return v;
}

std::string header_value(const std::string& line, const std::string& key) {
  const std::string prefix = key + "=";
  if (line.rfind(prefix, 0) != 0) throw ConfigError("field header: expected '" + prefix + "', got '" + line + "'");
  return line.substr(prefix.size());
}

}  // namespace

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_text(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
    if (!out) throw ConfigError("write failed for " + path);
  }
  std::filesystem::rename(tmp, path);
}

void write_directions(const std::string& path, const DirectionSet& set) {
  std::ostringstream os;
  os << "# dim=" << set.dim << " delta=" << format_double(set.separation)
     << " eta=" << (set.diameter_bound ? format_double(*set.diameter_bound) : "inf") << "\n";
  for (const auto& v : set.points) {
    for (int i = 0; i < v.dim(); ++i) os << (i ? "\t" : "") << format_double(v[i]);
    os << "\n";
  }
  write_text(path, os.str());
}

DirectionSet read_directions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open direction file " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("#", 0) != 0) throw ConfigError(path + ": missing '# dim=' header");
  DirectionSet set;
  bool have_dim = false, have_delta = false;
  std::istringstream hs(line.substr(1));
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ": malformed header token '" + tok + "'");
    const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "dim") {
      set.dim = static_cast<int>(parse_int(val, "dim"));
      have_dim = true;
    } else if (key == "delta") {
      set.separation = parse_double(val, "delta");
      have_delta = true;
    } else if (key == "eta") {
      const double eta = parse_double(val, "eta");
      if (std::isfinite(eta)) set.diameter_bound = eta;
    } else {
      throw ConfigError(path + ": unknown header key '" + key + "'");
    }
  }
  if (!have_dim || !have_delta) throw ConfigError(path + ": header needs dim and delta");
  if (set.dim < 2) throw ConfigError(path + ": dim must be >= 2");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<double> c;
    std::istringstream ls(line);
    while (std::getline(ls, tok, '\t')) c.push_back(parse_double(trim(tok), "coordinate on line " + std::to_string(lineno)));
    if (static_cast<int>(c.size()) != set.dim)
      throw ConfigError(path + ": line " + std::to_string(lineno) + " has " + std::to_string(c.size()) + " coordinates");
    try {
      set.points.push_back(Direction::from_unit(std::move(c), 1e-9));
    } catch (const std::invalid_argument&) {
      throw ConfigError(path + ": line " + std::to_string(lineno) + " is not a unit vector");
    }
  }
  return set;
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_field(const std::string& path, const GridField& f) {
  const auto* bytes = reinterpret_cast<const char*>(f.values().data());
  const std::size_t nbytes = f.size() * sizeof(Complex);
  char sum[32];
  std::snprintf(sum, sizeof sum, "%016" PRIx64, fnv1a64(bytes, nbytes));
  std::ostringstream os;
  os << "DIRMAX-FIELD 1\n"
     << "dim=" << f.dim() << "\n"
     << "N=" << f.points_per_axis() << "\n"
     << "L=" << format_double(f.box_length()) << "\n"
     << "count=" << f.size() << "\n"
     << "encoding=f64le-complex\n"
     << "checksum=" << sum << "\n"
     << "end\n";
  std::string text = os.str();
  text.append(bytes, nbytes);
  write_text(path, text);
}

GridField read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open field file " + path);
  std::string lines[8];
  for (auto& l : lines)
    if (!std::getline(in, l)) throw ConfigError(path + ": truncated field header");
  if (lines[0] != "DIRMAX-FIELD 1") throw ConfigError(path + ": not a field file");
  const int dim = static_cast<int>(parse_int(header_value(lines[1], "dim"), "dim"));
  const int n = static_cast<int>(parse_int(header_value(lines[2], "N"), "N"));
  const double L = parse_double(header_value(lines[3], "L"), "L");
  const long long count = parse_int(header_value(lines[4], "count"), "count");
  if (header_value(lines[5], "encoding") != "f64le-complex") throw ConfigError(path + ": unsupported encoding");
  const std::string sum = header_value(lines[6], "checksum");
  if (lines[7] != "end") throw ConfigError(path + ": header must end with 'end'");
  GridField f;
  try {
    f = GridField(dim, n, L);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (count < 0 || static_cast<std::size_t>(count) != f.size()) throw ConfigError(path + ": count does not match N^dim");
  const std::size_t nbytes = f.size() * sizeof(Complex);
  in.read(reinterpret_cast<char*>(f.values().data()), static_cast<std::streamsize>(nbytes));
  if (static_cast<std::size_t>(in.gcount()) != nbytes) throw ConfigError(path + ": truncated payload");
  char extra;
  if (in.read(&extra, 1)) throw ConfigError(path + ": trailing bytes after payload");
  char expect[32];
  std::snprintf(expect, sizeof expect, "%016" PRIx64, fnv1a64(f.values().data(), nbytes));
  if (sum != expect) throw ConfigError(path + ": checksum mismatch");
  for (const auto& z : f.values())
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw NumericError(path + ": non-finite field value");
  return f;
}

std::string CsvTable::str() const {
  std::ostringstream os;
  auto row = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << "\n";
  };
  row(header);
  for (const auto& r : rows) row(r);
  return os.str();
}

Json to_json(const Direction& v) {
  Json a = Json::array();
  for (int i = 0; i < v.dim(); ++i) a.push_back(v[i]);
  return a;
}

Json to_json(const ElBracket& b) {
  return Json{{"l", b.l},
              {"lower", b.lower},
              {"upper", b.upper},
              {"witness", to_json(b.witness_w)},
              {"resolution", b.sample_resolution}};
}

Json to_json(const FitReport& f) {
  Json j{{"x_label", f.x_label}, {"y_label", f.y_label}, {"x", f.xs}, {"y", f.ys},
         {"slope", f.slope},     {"intercept", f.intercept}, {"residual_rms", f.residual_rms},
         {"r_squared", f.r_squared}};
  if (f.target) j["target"] = *f.target;
  j["tolerance"] = f.tolerance;
  j["pass"] = f.pass;
  return j;
}

Json to_json(const BoundTrace& t) {
  Json nodes = Json::array();
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const BoundNode& n = t.nodes[i];
    Json j{{"id", i},
           {"role", node_role_name(n.role)},
           {"parent", n.parent},
           {"depth", n.depth},
           {"delta", n.delta},
           {"eta", n.eta},
           {"size", n.size},
           {"leaf", n.leaf},
           {"levels", n.levels},
           {"sigma_lower", n.sigma_lower},
           {"sigma_upper", n.sigma_upper},
           {"bound_M", n.bound_M},
           {"bound_T", n.bound_T}};
    if (n.supplied) j["supplied"] = true;
    if (!n.leaf) {
      j["cover_scale"] = n.cover_scale;
      j["cap_count"] = n.cap_count;
      j["max_cap_size"] = n.max_cap_size;
      j["E_lower"] = n.el_lower;
      j["E_upper"] = n.el_upper;
      j["representatives"] = n.representatives;
      j["caps"] = n.caps;
    }
    nodes.push_back(std::move(j));
  }
  const auto& c = t.config;
  return Json{{"dim", t.dim},
              {"config",
               {{"C", c.C},
                {"c", c.c},
                {"l_max", c.l_max},
                {"base_threshold", c.base_threshold},
                {"base_cardinality", c.base_cardinality},
                {"C0", c.constant_C0},
                {"resolution_factor", c.resolution_factor}}},
              {"bound_M", t.bound_M},
              {"bound_T", t.bound_T},
              {"max_depth", t.max_depth},
              {"contraction", t.contraction},
              {"closure_ok", t.closure_ok},
              {"nodes", std::move(nodes)}};
}

Json to_json(const SharpnessReport& r) {
  Json pts = Json::array();
  for (const auto& p : r.points)
    pts.push_back({{"delta", p.delta},
                   {"seed", p.seed},
                   {"count", p.count},
                   {"ratio_average", p.ratio_average},
                   {"ratio_hilbert", p.ratio_hilbert}});
  return Json{{"dim", r.dim}, {"points", pts}, {"fit_average", to_json(r.fit_average)}, {"fit_hilbert", to_json(r.fit_hilbert)}};
}

Json to_json(const KernelReport& r) {
  return Json{{"max_ratio", r.max_ratio},
              {"ratio_at_origin", r.ratio_at_origin},
              {"max_abs_kernel", r.max_abs_kernel},
              {"zero_kernel", r.zero_kernel}};
}

Json to_json(const MaximalReport& r) {
  double lo = INFINITY, hi = 0.0;
  for (const auto& z : r.output.values()) {
    lo = std::min(lo, z.real());
    hi = std::max(hi, z.real());
  }
  return Json{{"operator", r.operator_id},
              {"input", r.input_id},
              {"points", r.output.size()},
              {"l2_ratio", r.l2_ratio},
              {"output_min", r.output.size() ? lo : 0.0},
              {"output_max", hi}};
}

}  // namespace dirmax
