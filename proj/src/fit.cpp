#include "dirmax/fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dirmax/error.hpp"

namespace dirmax {

void FitReport::judge(double target_slope, double tol) {
  target = target_slope;
  tolerance = tol;
  pass = std::abs(slope - target_slope) <= tol;
}

FitReport fit_linear(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fit needs equally many x and y values");
  if (xs.size() < 2) throw std::invalid_argument("fit needs at least two points");
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) throw NumericError("non-finite value in fit data");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double span = *std::max_element(xs.begin(), xs.end()) - *std::min_element(xs.begin(), xs.end());
  if (!(span > 1e-12 * std::max(1.0, std::abs(mx)))) throw std::invalid_argument("fit x values are degenerate");
  FitReport r;
  r.xs = xs;
  r.ys = ys;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (r.slope * xs[i] + r.intercept);
    ss += e * e;
  }
  r.residual_rms = std::sqrt(ss / n);
  r.r_squared = syy > 0.0 ? 1.0 - ss / syy : 1.0;
  return r;
}

FitReport fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fit needs equally many x and y values");
  if (xs.size() < 3) throw std::invalid_argument("log-log fit needs at least three points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw std::invalid_argument("log-log fit needs positive values");
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  auto sorted = lx;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) throw std::invalid_argument("fit x values are degenerate");
  FitReport r = fit_linear(lx, ly);
  r.x_label = "log x";
  r.y_label = "log y";
  return r;
}

}  // namespace dirmax
