#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dirmax/direction.hpp"
#include "dirmax/grid_field.hpp"

namespace dirmax {

// A Fourier multiplier: xi -> complex value.
using Symbol = std::function<Complex(std::span<const double>)>;

// Symbol values on every spectrum entry of `grid`. Entries off the Nyquist
// planes use symbol(xi). A Nyquist entry k is shared by several frequencies;
// conjugate pairs (k, -k) use the representatives xi(k) and -xi(k) (lower index
// first) and a self-conjugate entry averages symbol(xi) and symbol(-xi). A
// symbol with m(-xi) = conj(m(xi)) therefore maps real fields to real fields.
// Throws NumericError on a non-finite symbol value.
std::vector<Complex> multiplier_on_grid(const GridField& grid, const Symbol& symbol);

GridField apply_multiplier(const GridField& f, const Symbol& symbol);

// The forward transform of one input, reused across many multipliers.
class Spectrum {
 public:
  explicit Spectrum(const GridField& f);
  GridField apply(const Symbol& symbol) const;
  GridField apply_values(const std::vector<Complex>& multiplier) const;
  const GridField& grid() const { return grid_; }
  const std::vector<Complex>& values() const { return data_; }

 private:
  GridField grid_;  // geometry only
  std::vector<Complex> data_;
};

// One-dimensional Mikhlin symbol m, evaluated at s = v . xi.
struct MultiplierSpec {
  std::string name;
  std::function<Complex(double)> symbol;
  Complex zero_value{};       // used at s == 0 (midpoint of a jump, or the limit)
  double sup_norm = 1.0;      // C_0 = sup |m|
  double derivative_bound = 0.0;  // C_1 >= sup |s m'(s)|
  int mikhlin_order = 1;
  bool odd = false;           // m(-s) = -m(s)

  Complex operator()(double s) const { return s == 0.0 ? zero_value : symbol(s); }

  static MultiplierSpec identity();
  // -i sgn(s): the directional Hilbert transform.
  static MultiplierSpec hilbert();
  // |s|^{i alpha}: unimodular, |s m'(s)| = |alpha|.
  static MultiplierSpec imaginary_power(double alpha = 1.0);
};

struct MikhlinCheck {
  double sampled_sup = 0.0;
  double sampled_c1 = 0.0;
  bool ok = false;
};

// Samples |m| and the finite-difference quantity |s| |dm/ds| on a log-spaced
// set of |s| in [1e-6, 1e6] of both signs.
MikhlinCheck check_mikhlin(const MultiplierSpec& m, double tolerance = 1e-3);

// Smooth step: 0 for t <= 0, 1 for t >= 1, and smooth_step(t) + smooth_step(1 - t) = 1.
double smooth_step(double t);

// phi = 2 pi |g^|^2 for the normalized exponential bump g on [-1/2, 1/2], so that
// phi >= 0, phi >= phi(1) > 0 on [-1, 1], and its transform g * g is supported in
// [-1, 1] with value 1 at the origin.
class BumpPhi {
 public:
  BumpPhi();
  double profile(double t) const;
  // phi^(s) = integral phi(t) e^{-its} dt; zero for |s| >= 1.
  double fourier(double s) const;
  double integral() const { return 1.0; }
  double lower_bound_const() const { return lower_bound_; }
  double fourier_support_radius() const { return 1.0; }

 private:
  double bump(double s) const;
  double norm_ = 1.0;
  double lower_bound_ = 0.0;
  std::vector<double> table_;  // fourier on [0, 1]
};

const BumpPhi& default_phi();

// Radial cutoff equal to 1 on |xi| <= 1 and 0 on |xi| >= 2.
double radial_cutoff(double r);

// Littlewood-Paley profile chi(xi) as a function of r = |xi|: supported on
// [1/2, 2], chi(1) = 1, and sum_k chi(2^{-k} r) = 1 for r > 0.
double lp_profile(double r);

// Bump equal to 1 on (1+c)/2 <= |t| <= 1+c, supported on 1/2 + c/4 <= |t| <= 1 + 5c/4.
double shell_bump(double t, double c);

// The l-th cone piece around center: l = 0 is {|v.xi| <= (1+c) delta |xi|},
// l >= 1 the shell (1+c) 2^{l-1} delta |xi| < |v.xi| <= (1+c) 2^l delta |xi|.
struct ConeSpec {
  Direction center;
  double delta = 0.1;
  double c = 1.0;
  int l = 0;

  void validate() const;
  // Last nonempty shell.
  int saturation() const;
};

// Index l of the piece containing xi (xi = 0 belongs to l = 0), capped at saturation().
int shell_index(const Direction& center, double delta, double c, std::span<const double> xi);

Symbol average_symbol(const Direction& v, double h, const BumpPhi& phi);
Symbol singular_symbol(const Direction& v, const MultiplierSpec& m);
Symbol cone_symbol(const ConeSpec& cone);

// A_{v,h} f(x) = (1/h) int f(x - v t) phi(t/h) dt.
GridField directional_average(const GridField& f, const Direction& v, double h, const BumpPhi& phi = default_phi());
// T_v f with multiplier m(v . xi).
GridField directional_singular(const GridField& f, const Direction& v, const MultiplierSpec& m);
// Fourier restriction to the cone piece.
GridField cone_restrict(const GridField& f, const ConeSpec& cone);
// L_k: multiplier lp_profile(2^{-k} |xi|).
GridField littlewood_paley(const GridField& f, int k);
// Levels k whose annulus meets the grid's nonzero frequencies.
std::pair<int, int> littlewood_paley_range(const GridField& grid);

// Frequencies sampled inside a cone piece: xi = r u, where u . center runs over
// `polar_steps` values across the piece and the rest of u over a circle (or
// sphere) of `azimuth_steps` directions orthogonal to the center.
struct FrequencySample {
  std::vector<double> radii{1.0};
  int polar_steps = 400;
  int azimuth_steps = 256;

  static FrequencySample log_spaced(double lo, double hi, int count, int polar = 400, int azimuth = 256);
};

// max over sampled xi in the piece of |m(v . xi) - m(v_j . xi)|. Requires
// |v - v_j| <= cone.delta and cone.center == v_j.
double multiplier_difference_max(const Direction& v, const Direction& v_j, const MultiplierSpec& m,
                                 const ConeSpec& cone, const FrequencySample& sample);

struct KernelGrid {
  int dim = 3;
  int points_per_axis = 64;
  double box_length = 0.0;
};

struct KernelReport {
  double max_ratio = 0.0;       // max_x |K(x)| / envelope(x)
  double ratio_at_origin = 0.0;
  double max_abs_kernel = 0.0;
  bool zero_kernel = false;     // difference symbol vanished on the shell
};

// Kernel of (m(v.xi) - m(e_n.xi)) psi((2^l delta)^{-1} xi_n / |xi|) chi(2^{-k} xi)
// on the grid, compared with the anisotropic decay envelope
// 2^{-l} 2^{kn} 2^l delta / prod_i (1 + 2^k |x_i|)^2 (1 + 2^{k+l} delta |x_n|)^2.
// Requires v_j = e_n (the last axis).
KernelReport kernel_decay_check(const Direction& v, const Direction& v_j, const MultiplierSpec& m,
                                const ConeSpec& cone, int k, const KernelGrid& grid);


// Real random field with Gaussian spectral coefficients on |k_i| <= band
// (integer wave numbers), scaled to max |f| = 1.
GridField random_band_limited_field(int dim, int points_per_axis, double box_length, int band, std::uint64_t seed);
// Indicator of the ball of `radius` about the box center; with smoothing > 0 the
// spectrum is multiplied by radial_cutoff(smoothing |xi|).
GridField ball_indicator_field(int dim, int points_per_axis, double box_length, double radius, double smoothing = 0.0);

}  // namespace dirmax
