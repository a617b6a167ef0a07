#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dirmax/cap_cover.hpp"
#include "dirmax/direction.hpp"

namespace dirmax {

struct RecursionConfig {
  double C = 4.0;               // cover scale multiplier, >= 2
  double c = 1.0;               // hyperplane slack
  int l_max = 12;               // largest E_l level used by the T recursion
  double base_threshold = 4.0;  // eta / delta at or below which a node is a leaf, >= C
  std::size_t base_cardinality = 8;  // #Omega at or below which a node is a leaf
  double constant_C0 = 1.0;
  double resolution_factor = 0.25;   // E_l sample resolution, relative to the cover scale

  void validate() const;
  // Defaults for a given C (base_threshold = C).
  static RecursionConfig with_scale(double C);
};

enum class NodeRole { Root, Representatives, Cap };
const char* node_role_name(NodeRole role);

struct BoundNode {
  NodeRole role = NodeRole::Root;
  int parent = -1;
  int depth = 0;
  double delta = 0.0;  // separation
  double eta = 0.0;    // diameter
  std::size_t size = 0;
  bool leaf = false;
  bool supplied = false;  // leaf bound given externally (mixed sets)

  // Interior nodes only.
  double cover_scale = 0.0;
  std::size_t cap_count = 0;
  std::size_t max_cap_size = 0;
  int representatives = -1;
  std::vector<int> caps;
  std::vector<int> el_lower;  // l = 0..levels
  std::vector<int> el_upper;

  // sum_{l <= levels} 2^{-l} sqrt(E_l), from the brackets (interior) or E_l = 1 (leaves).
  int levels = 0;
  double sigma_lower = 0.0;
  double sigma_upper = 0.0;

  double bound_M = 0.0;
  double bound_T = 0.0;
};

struct BoundTrace {
  int dim = 0;
  RecursionConfig config;
  std::vector<BoundNode> nodes;  // nodes[0] is the root
  double bound_M = 0.0;
  double bound_T = 0.0;
  int max_depth = 0;
  // C0 C^{-(n-2)/2} <= 1/2 (always true for n = 2, where the recursion does not contract).
  double contraction = 1.0;
  bool closure_ok = true;
};

BoundTrace certify_M(const DirectionSet& omega, const RecursionConfig& cfg);
BoundTrace certify_T(const DirectionSet& omega, const RecursionConfig& cfg);
// Both bounds from one tree.
BoundTrace certify(const DirectionSet& omega, const RecursionConfig& cfg);

// One level of the recursion over an externally supplied cover: cap j is a
// leaf with the supplied bounds, the representatives are certified recursively.
BoundTrace certify_mixed(const DirectionSet& omega, const CapCover& cover, const std::vector<double>& cap_bounds_M,
                         const std::vector<double>& cap_bounds_T, const RecursionConfig& cfg);
// Same bound for both norms.
BoundTrace certify_mixed(const DirectionSet& omega, const CapCover& cover, const std::vector<double>& cap_bounds,
                         const RecursionConfig& cfg);

// Node formulas.
double leaf_bound_M(const BoundNode& node);
double leaf_bound_T(const BoundNode& node);
double sigma_term(const std::vector<int>& el, int levels);

// Recomputes every interior bound bottom-up from stored brackets and children.
void recompute(BoundTrace& trace);
// True when every stored bound equals the node formula applied to its children.
bool audit(const BoundTrace& trace);

}  // namespace dirmax
