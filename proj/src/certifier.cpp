#include "dirmax/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dirmax/cone_counts.hpp"
#include "dirmax/error.hpp"

namespace dirmax {

namespace {

double sqrt_log(std::size_t count) { return std::sqrt(std::log(static_cast<double>(std::max<std::size_t>(count, 2)))); }

class Builder {
 public:
  Builder(int dim, const RecursionConfig& cfg) : dim_(dim), cfg_(cfg) {}

  int build(const DirectionSet& set, double eta, NodeRole role, int parent, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    {
      BoundNode& node = nodes_.back();
      node.role = role;
      node.parent = parent;
      node.depth = depth;
      node.delta = set.separation;
      node.eta = eta;
      node.size = set.size();
      node.leaf = set.size() <= cfg_.base_cardinality || eta / set.separation <= cfg_.base_threshold * (1.0 + 1e-12);
      node.levels = std::min(cfg_.l_max, saturation_level(cfg_.C * set.separation, cfg_.c));
    }
    max_depth_ = std::max(max_depth_, depth);
    if (nodes_[id].leaf) {
      nodes_[id].sigma_lower = nodes_[id].sigma_upper = sigma_term({}, nodes_[id].levels);
      nodes_[id].bound_M = leaf_bound_M(nodes_[id]);
      nodes_[id].bound_T = leaf_bound_T(nodes_[id]);
      return id;
    }

    const double scale = cfg_.C * set.separation;
    CapCover cover = build_cap_cover(set, scale, cfg_.c);
    if (cover.cap_count() < 2) throw NumericError("recursion fails to shrink: degenerate geometry at depth " + std::to_string(depth));
    attach_brackets(id, cover, scale);

    const int reps = build(cover.center_set(dim_, scale), eta, NodeRole::Representatives, id, depth + 1);
    nodes_[id].representatives = reps;
    std::size_t max_cap = 0;
    for (const auto& members : cover.caps()) {
      DirectionSet sub{dim_, {}, set.separation, std::nullopt};
      for (int i : members) sub.points.push_back(set.points[i]);
      max_cap = std::max(max_cap, sub.size());
      // A cap carries the cover's diameter delta_j = scale.
      sub.diameter_bound = scale;
      if (sub.size() == set.size()) throw NumericError("recursion fails to shrink: cap equals its parent");
      const int child = build(sub, scale, NodeRole::Cap, id, depth + 1);
      nodes_[id].caps.push_back(child);
    }
    nodes_[id].max_cap_size = max_cap;
    evaluate(nodes_, nodes_[id]);
    return id;
  }

  void attach_brackets(int id, const CapCover& cover, double scale) {
    BoundNode& node = nodes_[id];
    node.cover_scale = scale;
    node.cap_count = cover.cap_count();
    const auto br = bracket_El_range(cover, node.levels, cfg_.resolution_factor * scale);
    for (const auto& b : br) {
      node.el_lower.push_back(b.lower);
      node.el_upper.push_back(b.upper);
    }
    node.sigma_lower = sigma_term(node.el_lower, node.levels);
    node.sigma_upper = sigma_term(node.el_upper, node.levels);
  }

  static void evaluate(const std::vector<BoundNode>& nodes, BoundNode& node) {
    double cap_m = 0.0, cap_t = 0.0;
    for (int child : node.caps) {
      const BoundNode& k = nodes[child];
      cap_m = std::max(cap_m, k.bound_M);
      cap_t = std::max(cap_t, k.bound_T + sqrt_log(k.size));
    }
    const BoundNode& reps = nodes[node.representatives];
    node.bound_M = reps.bound_M + cap_m * std::sqrt(static_cast<double>(node.el_upper.at(0)));
    node.bound_T = reps.bound_T + cap_t * node.sigma_upper;
  }

  std::vector<BoundNode> take() { return std::move(nodes_); }
  int max_depth() const { return max_depth_; }

 private:
  int dim_;
  RecursionConfig cfg_;
  std::vector<BoundNode> nodes_;
  int max_depth_ = 0;
};

void finish(BoundTrace& t) {
  t.bound_M = t.nodes.at(0).bound_M;
  t.bound_T = t.nodes.at(0).bound_T;
  if (t.dim >= 3) {
    t.contraction = t.config.constant_C0 * std::pow(t.config.C, -(t.dim - 2) / 2.0);
    t.closure_ok = t.contraction <= 0.5;
  }
}

void check_set(const DirectionSet& omega) {
  if (omega.empty()) throw std::invalid_argument("direction set is empty");
  if (omega.dim < 2) throw std::invalid_argument("direction set dimension must be >= 2");
  if (!(omega.separation > 0.0)) throw std::invalid_argument("direction set separation must be positive");
}

}  // namespace

void RecursionConfig::validate() const {
  if (!(C >= 2.0) || !std::isfinite(C)) throw ConfigError("C must be >= 2");
  if (!(c > 0.0 && c <= 1.0)) throw ConfigError("c must lie in (0, 1]");
  if (l_max < 0) throw ConfigError("l_max must be non-negative");
  if (!(base_threshold >= C)) throw ConfigError("base_threshold must be >= C");
  if (base_cardinality < 1) throw ConfigError("base_cardinality must be positive");
  if (!(constant_C0 > 0.0)) throw ConfigError("C0 must be positive");
  if (!(resolution_factor > 0.0 && resolution_factor <= 1.0)) throw ConfigError("resolution_factor must lie in (0, 1]");
}

RecursionConfig RecursionConfig::with_scale(double C) {
  RecursionConfig cfg;
  cfg.C = C;
  cfg.base_threshold = C;
  return cfg;
}

const char* node_role_name(NodeRole role) {
  switch (role) {
    case NodeRole::Root: return "root";
    case NodeRole::Representatives: return "representatives";
    case NodeRole::Cap: return "cap";
  }
  return "unknown";
}

double sigma_term(const std::vector<int>& el, int levels) {
  double s = 0.0;
  for (int l = 0; l <= levels; ++l) {
    const double e = el.empty() ? 1.0 : static_cast<double>(el.at(l));
    s += std::ldexp(std::sqrt(e), -l);
  }
  return s;
}

double leaf_bound_M(const BoundNode& node) { return std::sqrt(static_cast<double>(node.size)); }

double leaf_bound_T(const BoundNode& node) { return 1.0 + sqrt_log(node.size) * node.sigma_upper; }

BoundTrace certify(const DirectionSet& omega, const RecursionConfig& cfg) {
  cfg.validate();
  check_set(omega);
  Builder b(omega.dim, cfg);
  const double eta = omega.diameter_bound.value_or(2.0);
  b.build(omega, eta, NodeRole::Root, -1, 0);
  BoundTrace t;
  t.dim = omega.dim;
  t.config = cfg;
  t.max_depth = b.max_depth();
  t.nodes = b.take();
  finish(t);
  return t;
}

BoundTrace certify_M(const DirectionSet& omega, const RecursionConfig& cfg) { return certify(omega, cfg); }
BoundTrace certify_T(const DirectionSet& omega, const RecursionConfig& cfg) { return certify(omega, cfg); }

BoundTrace certify_mixed(const DirectionSet& omega, const CapCover& cover, const std::vector<double>& cap_bounds,
                         const RecursionConfig& cfg) {
  return certify_mixed(omega, cover, cap_bounds, cap_bounds, cfg);
}

BoundTrace certify_mixed(const DirectionSet& omega, const CapCover& cover, const std::vector<double>& cap_bounds_M,
                         const std::vector<double>& cap_bounds_T, const RecursionConfig& cfg) {
  cfg.validate();
  check_set(omega);
  if (cover.membership.size() != omega.size()) throw std::invalid_argument("cover does not match the direction set");
  if (cover.diameters.size() != cover.cap_count()) throw std::invalid_argument("cover diameters do not match its centers");
  if (cap_bounds_M.size() != cover.cap_count() || cap_bounds_T.size() != cover.cap_count())
    throw std::invalid_argument("one bound per cap expected");
  if (!validate_cover(cover, omega, false)) throw std::invalid_argument("cover does not contain the direction set");
  const auto members = cover.caps();
  for (std::size_t j = 0; j < members.size(); ++j) {
    if (members[j].empty()) throw std::invalid_argument("empty cap in mixed set");
    if (!(cap_bounds_M[j] >= 0.0) || !(cap_bounds_T[j] >= 0.0))
      throw std::invalid_argument("cap bounds must be non-negative");
  }

  const double scale = *std::max_element(cover.diameters.begin(), cover.diameters.end());
  const double center_sep = [&] {
    DirectionSet cs = cover.center_set(omega.dim, 0.0);
    return cs.size() > 1 ? min_pairwise_distance(cs) : 2.0;
  }();
  const DirectionSet centers = cover.center_set(omega.dim, center_sep);

  BoundTrace t;
  t.dim = omega.dim;
  t.config = cfg;
  BoundNode root;
  root.role = NodeRole::Root;
  root.delta = omega.separation;
  root.eta = omega.diameter_bound.value_or(2.0);
  root.size = omega.size();
  root.cover_scale = scale;
  root.cap_count = cover.cap_count();
  root.levels = std::min(cfg.l_max, saturation_level(cover));
  t.nodes.push_back(root);

  Builder b(omega.dim, cfg);
  b.build(centers, root.eta, NodeRole::Representatives, 0, 1);
  auto sub = b.take();
  const int offset = 1;
  for (auto& node : sub) {
    node.parent = node.parent < 0 ? 0 : node.parent + offset;
    if (node.representatives >= 0) node.representatives += offset;
    for (int& k : node.caps) k += offset;
    t.nodes.push_back(std::move(node));
  }
  t.nodes[0].representatives = 1;
  t.max_depth = b.max_depth();

  const auto br = bracket_El_range(cover, t.nodes[0].levels, cfg.resolution_factor * scale);
  for (const auto& e : br) {
    t.nodes[0].el_lower.push_back(e.lower);
    t.nodes[0].el_upper.push_back(e.upper);
  }
  t.nodes[0].sigma_lower = sigma_term(t.nodes[0].el_lower, t.nodes[0].levels);
  t.nodes[0].sigma_upper = sigma_term(t.nodes[0].el_upper, t.nodes[0].levels);

  for (std::size_t j = 0; j < members.size(); ++j) {
    BoundNode cap;
    cap.role = NodeRole::Cap;
    cap.parent = 0;
    cap.depth = 1;
    cap.delta = omega.separation;
    cap.eta = cover.diameters[j];
    cap.size = members[j].size();
    cap.leaf = true;
    cap.supplied = true;
    cap.bound_M = cap_bounds_M[j];
    cap.bound_T = cap_bounds_T[j];
    t.nodes[0].max_cap_size = std::max(t.nodes[0].max_cap_size, cap.size);
    t.nodes[0].caps.push_back(static_cast<int>(t.nodes.size()));
    t.nodes.push_back(cap);
  }
  t.max_depth = std::max(t.max_depth, 1);
  Builder::evaluate(t.nodes, t.nodes[0]);
  finish(t);
  return t;
}

void recompute(BoundTrace& trace) {
  // Children always have larger indices than their parents.
  for (std::size_t i = trace.nodes.size(); i-- > 0;) {
    BoundNode& node = trace.nodes[i];
    if (node.representatives < 0) continue;
    node.sigma_lower = sigma_term(node.el_lower, node.levels);
    node.sigma_upper = sigma_term(node.el_upper, node.levels);
    Builder::evaluate(trace.nodes, node);
  }
  finish(trace);
}

bool audit(const BoundTrace& trace) {
  BoundTrace copy = trace;
  recompute(copy);
  for (std::size_t i = 0; i < trace.nodes.size(); ++i) {
    const BoundNode& a = trace.nodes[i];
    const BoundNode& b = copy.nodes[i];
    if (a.bound_M != b.bound_M || a.bound_T != b.bound_T) return false;
    if (!a.leaf || a.supplied) continue;
    const auto& cfg = trace.config;
    if (!(a.size <= cfg.base_cardinality || a.eta / a.delta <= cfg.base_threshold)) return false;
    if (a.bound_M != leaf_bound_M(a) || a.bound_T != leaf_bound_T(a)) return false;
  }
  return copy.bound_M == trace.bound_M && copy.bound_T == trace.bound_T;
}

}  // namespace dirmax
