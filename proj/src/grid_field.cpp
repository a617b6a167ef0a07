#include "dirmax/grid_field.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace dirmax {

namespace {

// FFTW planning is not thread-safe; plans are built once per shape under a
// lock and executed through the new-array interface.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int dim, int n, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    const auto key = std::make_tuple(dim, n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<int> dims(static_cast<std::size_t>(dim), n);
    std::size_t total = 1;
    for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(n);
    fftw_complex* buf = fftw_alloc_complex(total);
    fftw_plan p = fftw_plan_dft(dim, dims.data(), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!p) throw std::runtime_error("FFTW could not create a plan");
    plans_.emplace(key, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void execute(std::vector<Complex>& data, int dim, int n, int sign) {
  fftw_plan p = PlanCache::instance().get(dim, n, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, ptr, ptr);
}

}  // namespace

GridField::GridField(int dim, int points_per_axis, double box_length)
    : dim_(dim), n_(points_per_axis), length_(box_length) {
  if (dim < 1 || dim > 6) throw std::invalid_argument("grid dimension must lie in 1..6");
  if (points_per_axis < 2 || (points_per_axis & (points_per_axis - 1)) != 0)
    throw std::invalid_argument("points per axis must be a power of two");
  if (!(box_length > 0.0)) throw std::invalid_argument("box length must be positive");
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(points_per_axis);
  values_.assign(total, Complex{});
}

GridField GridField::from_function(int dim, int points_per_axis, double box_length,
                                   const std::function<Complex(std::span<const double>)>& fn) {
  GridField f(dim, points_per_axis, box_length);
  std::vector<double> x(static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.position(i, x);
    f.values_[i] = fn(x);
  }
  return f;
}

void GridField::multi_index(std::size_t idx, std::span<int> out) const {
  for (int a = dim_ - 1; a >= 0; --a) {
    out[static_cast<std::size_t>(a)] = static_cast<int>(idx % static_cast<std::size_t>(n_));
    idx /= static_cast<std::size_t>(n_);
  }
}

std::size_t GridField::flat_index(std::span<const int> digits) const {
  std::size_t idx = 0;
  for (int a = 0; a < dim_; ++a) {
    int d = digits[static_cast<std::size_t>(a)] % n_;
    if (d < 0) d += n_;
    idx = idx * static_cast<std::size_t>(n_) + static_cast<std::size_t>(d);
  }
  return idx;
}

void GridField::position(std::size_t idx, std::span<double> x) const {
  int digits[8];
  multi_index(idx, {digits, static_cast<std::size_t>(dim_)});
  for (int a = 0; a < dim_; ++a) x[static_cast<std::size_t>(a)] = digits[a] * spacing();
}

void GridField::wave_number(std::size_t idx, std::span<int> k) const {
  multi_index(idx, k);
  for (int a = 0; a < dim_; ++a)
    if (k[static_cast<std::size_t>(a)] >= n_ / 2) k[static_cast<std::size_t>(a)] -= n_;
}

void GridField::frequency(std::size_t idx, std::span<double> xi) const {
  int k[8];
  wave_number(idx, {k, static_cast<std::size_t>(dim_)});
  const double unit = 2.0 * std::numbers::pi / length_;
  for (int a = 0; a < dim_; ++a) xi[static_cast<std::size_t>(a)] = unit * k[a];
}

std::size_t GridField::conjugate_index(std::size_t idx) const {
  int digits[8];
  multi_index(idx, {digits, static_cast<std::size_t>(dim_)});
  for (int a = 0; a < dim_; ++a) digits[a] = -digits[a];
  return flat_index({digits, static_cast<std::size_t>(dim_)});
}

bool GridField::touches_nyquist(std::size_t idx) const {
  int digits[8];
  multi_index(idx, {digits, static_cast<std::size_t>(dim_)});
  for (int a = 0; a < dim_; ++a)
    if (digits[a] == n_ / 2) return true;
  return false;
}

bool GridField::same_grid(const GridField& other) const {
  return dim_ == other.dim_ && n_ == other.n_ && length_ == other.length_;
}

double GridField::l2_norm() const {
  double s = 0.0;
  for (const auto& v : values_) s += std::norm(v);
  return std::sqrt(s * std::pow(spacing(), dim_));
}

Complex GridField::mean() const {
  Complex s{};
  for (const auto& v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

double GridField::max_abs_imag() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
  return m;
}

std::vector<Complex> forward_dft(const GridField& f) {
  std::vector<Complex> data = f.values();
  execute(data, f.dim(), f.points_per_axis(), FFTW_FORWARD);
  return data;
}

GridField inverse_dft(std::vector<Complex> spectrum, const GridField& grid) {
  if (spectrum.size() != grid.size()) throw std::invalid_argument("spectrum size does not match the grid");
  execute(spectrum, grid.dim(), grid.points_per_axis(), FFTW_BACKWARD);
  GridField out(grid.dim(), grid.points_per_axis(), grid.box_length());
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (std::size_t i = 0; i < spectrum.size(); ++i) out[i] = spectrum[i] * scale;
  return out;
}

GridField abs_field(const GridField& f) {
  GridField out = f;
  for (auto& v : out.values()) v = std::abs(v);
  return out;
}

GridField operator-(const GridField& a, const GridField& b) {
  if (!a.same_grid(b)) throw std::invalid_argument("fields live on different grids");
  GridField out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

GridField operator+(const GridField& a, const GridField& b) {
  if (!a.same_grid(b)) throw std::invalid_argument("fields live on different grids");
  GridField out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

double max_abs_difference(const GridField& a, const GridField& b) {
  if (!a.same_grid(b)) throw std::invalid_argument("fields live on different grids");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace dirmax
