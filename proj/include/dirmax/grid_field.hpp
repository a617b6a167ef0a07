#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace dirmax {

using Complex = std::complex<double>;

// Complex field on the periodic grid (L/N) Z^n mod L, row-major with axis 0
// slowest. Grid frequencies are (2 pi / L) k with k_i in [-N/2, N/2).
class GridField {
 public:
  GridField() = default;
  // N must be a power of two; L > 0.
  GridField(int dim, int points_per_axis, double box_length);

  static GridField from_function(int dim, int points_per_axis, double box_length,
                                 const std::function<Complex(std::span<const double>)>& fn);

  int dim() const { return dim_; }
  int points_per_axis() const { return n_; }
  double box_length() const { return length_; }
  double spacing() const { return length_ / n_; }
  std::size_t size() const { return values_.size(); }

  std::vector<Complex>& values() { return values_; }
  const std::vector<Complex>& values() const { return values_; }
  Complex& operator[](std::size_t i) { return values_[i]; }
  const Complex& operator[](std::size_t i) const { return values_[i]; }

  // Multi-index of a flat index (digit i for axis i).
  void multi_index(std::size_t idx, std::span<int> out) const;
  std::size_t flat_index(std::span<const int> digits) const;
  // Position m * (L/N) of a grid point, m_i in [0, N).
  void position(std::size_t idx, std::span<double> x) const;
  // Signed wave number k_i in [-N/2, N/2) of spectrum entry idx.
  void wave_number(std::size_t idx, std::span<int> k) const;
  // Angular frequency (2 pi / L) k of spectrum entry idx.
  void frequency(std::size_t idx, std::span<double> xi) const;
  // Index of the spectrum entry holding frequency -k (mod N).
  std::size_t conjugate_index(std::size_t idx) const;
  // True when some component of k equals -N/2.
  bool touches_nyquist(std::size_t idx) const;

  bool same_grid(const GridField& other) const;
  // sqrt(dx^n sum |f|^2): the L^2 norm of the piecewise-constant field.
  double l2_norm() const;
  Complex mean() const;
  double max_abs_imag() const;

 private:
  int dim_ = 0;
  int n_ = 0;
  double length_ = 0.0;
  std::vector<Complex> values_;
};

// Unnormalized forward DFT (sum f e^{-i k.m 2pi/N}).
std::vector<Complex> forward_dft(const GridField& f);
// Inverse DFT with the 1/N^n factor, written into a field on `grid`'s lattice.
GridField inverse_dft(std::vector<Complex> spectrum, const GridField& grid);

GridField abs_field(const GridField& f);
GridField operator-(const GridField& a, const GridField& b);
GridField operator+(const GridField& a, const GridField& b);
double max_abs_difference(const GridField& a, const GridField& b);

}  // namespace dirmax
