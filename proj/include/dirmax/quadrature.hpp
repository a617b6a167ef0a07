#pragma once

#include <utility>
#include <vector>

namespace dirmax {

// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

// Composite Gauss-Legendre integral of f over [a, b].
template <class F>
double integrate(F&& f, double a, double b, int panels = 8, int order = 16);

}  // namespace dirmax

#include <cmath>

namespace dirmax {

template <class F>
double integrate(F&& f, double a, double b, int panels, int order) {
  static thread_local int cached_order = 0;
  static thread_local std::pair<std::vector<double>, std::vector<double>> rule;
  if (cached_order != order) {
    rule = gauss_legendre(order);
    cached_order = order;
  }
  const double h = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t i = 0; i < rule.first.size(); ++i) s += rule.second[i] * f(mid + 0.5 * h * rule.first[i]);
  }
  return s * 0.5 * h;
}

}  // namespace dirmax
