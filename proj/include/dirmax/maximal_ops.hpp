#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dirmax/direction.hpp"
#include "dirmax/field_ops.hpp"
#include "dirmax/fit.hpp"
#include "dirmax/grid_field.hpp"

namespace dirmax {

// Discretization of sup_{h > 0}: a geometric sequence of scales.
struct ScaleGrid {
  std::vector<double> h_values;

  // lo, lo*ratio, ... up to the last value <= hi*(1+1e-12).
  static ScaleGrid geometric(double lo, double hi, double ratio = 2.0);
  // Scales from one grid spacing L/N up to L.
  static ScaleGrid for_grid(const GridField& grid, double ratio = 2.0);
  void validate() const;
  // Same span with the ratio square-rooted.
  ScaleGrid refined() const;
};

struct MaximalReport {
  std::string operator_id;
  std::string input_id;
  GridField output;  // real, non-negative
  double l2_ratio = 0.0;
  // Per grid point: index of the direction (and scale, where applicable) attaining the sup.
  std::vector<std::uint32_t> argmax_direction;
  std::vector<std::uint16_t> argmax_scale;
};

// sup over v in omega and h in scales of |A_{v,h} f|.
MaximalReport maximal_average(const GridField& f, const DirectionSet& omega, const ScaleGrid& scales,
                              const BumpPhi& phi = default_phi());
// sup over v in omega of |T_v f|.
MaximalReport maximal_singular(const GridField& f, const DirectionSet& omega, const MultiplierSpec& m);
// sup over v in omega of the sharp unit-length average of |f| along v.
MaximalReport single_scale_maximal(const GridField& f, const DirectionSet& omega);

// Centered rectangles of side h along the last axis and delta*h across it, one
// per scale, averaged separably. Only v = e_n is representable.
GridField nikodym_maximal(const GridField& f, const Direction& v, double delta, const ScaleGrid& scales);
// sup over centered dyadic cubes spanning exactly `axes` (other axes untouched).
GridField hardy_littlewood(const GridField& f, std::span<const int> axes);
// One-dimensional maximal functions applied in turn along each axis.
GridField strong_maximal(const GridField& f, std::span<const int> axes);
// Average of |f| over the centered box with half-widths radius[i] grid points.
GridField box_average(const GridField& f, std::span<const int> radius);

// Pointwise inequalities lhs <= C rhs checked by the domination suite.
enum class Domination {
  NikodymByDirectional,  // N_{v,delta} f  vs  M_v(M_HL' f)
  LowPassByNikodym,      // sup_h |A_{v,h} cutoff(h delta D) f|  vs  N_{v,delta} f
  HighPassByCone,        // sup_h |A_{v,h} (I - cutoff(h delta D)) f|  vs  M_v M_HL R_W f, W = C_{v,2 delta}
  DirectionalByPieces,   // M_v f  vs  N_{v_j,delta} f + M_v M_HL R_{W_j} f, v_j = e_n, |v - v_j| <= delta
};

const char* domination_name(Domination kind);

struct DominationTerms {
  GridField lhs;
  GridField rhs;
};

// v must be e_n for the first three kinds. Scales should reach L/delta so that
// every Nikodym rectangle family can span the period; shorter grids leave
// points where the rectangles see nothing.
DominationTerms domination_terms(Domination kind, const GridField& f, const Direction& v, double delta,
                                 const ScaleGrid& scales);

// Smallest C with lhs <= C rhs + atol at every point (0 when lhs <= atol everywhere).
double domination_constant(const DominationTerms& t, double atol);
std::size_t domination_violations(const DominationTerms& t, double constant, double atol);

// Exact sup_h of the centered average of the unit-ball indicator along the line x + t v.
double ball_oracle_average(std::span<const double> x, const Direction& v);
// Exact (1/pi) p.v. integral of 1_B(x - v t) / t dt.
double ball_oracle_hilbert(std::span<const double> x, const Direction& v);

struct SharpnessOptions {
  int radial_nodes = 48;       // Gauss-Legendre nodes in log r on [1, 1/delta]
  int inner_nodes = 16;        // Gauss-Legendre nodes in r on [0, 1]
  int angular_points = 0;      // per radius; 0 picks a dimension default
  bool single_direction = false;  // use only the first net direction
  double convergence_tol = 0.05;  // relative change allowed when halving the angular sample
};

struct SharpnessPoint {
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  double ratio_average = 0.0;  // ||sup_v M_v 1_B||_2 / ||1_B||_2
  double ratio_hilbert = 0.0;  // ||sup_v |H_v 1_B| ||_2 / ||1_B||_2
};

struct SharpnessReport {
  int dim = 0;
  std::vector<SharpnessPoint> points;
  FitReport fit_average;  // log ratio against log #Omega
  FitReport fit_hilbert;
};

// Integrates the ball oracles over |x| < 1/delta for nets at each (delta, seed).
SharpnessReport sharpness_scan(int dim, const std::vector<double>& deltas, const std::vector<std::uint64_t>& seeds,
                               const SharpnessOptions& opts = {});

}  // namespace dirmax
