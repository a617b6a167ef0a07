#include "dirmax/direction.hpp"

#include <cmath>
#include <stdexcept>

#include "dirmax/parallel.hpp"

namespace dirmax {

namespace {
int g_threads = 1;
}

int thread_count() { return g_threads; }
void set_thread_count(int n) { g_threads = n < 1 ? 1 : n; }

Direction Direction::normalized(std::vector<double> coords) {
  if (coords.size() < 1) throw std::invalid_argument("direction needs at least one coordinate");
  double norm2 = 0.0;
  for (double c : coords) norm2 += c * c;
  const double norm = std::sqrt(norm2);
  if (!(norm > 0.0) || !std::isfinite(norm)) throw std::invalid_argument("cannot normalize a zero or non-finite vector");
  for (double& c : coords) c /= norm;
  return Direction(std::move(coords));
}

Direction Direction::from_unit(std::vector<double> coords, double tol) {
  if (coords.size() < 1) throw std::invalid_argument("direction needs at least one coordinate");
  double norm2 = 0.0;
  for (double c : coords) norm2 += c * c;
  if (!(std::abs(std::sqrt(norm2) - 1.0) <= tol)) throw std::invalid_argument("not a unit vector");
  return Direction(std::move(coords));
}

Direction Direction::axis(int dim, int axis) {
  if (dim < 1 || axis < 0 || axis >= dim) throw std::invalid_argument("axis index out of range");
  std::vector<double> c(static_cast<std::size_t>(dim), 0.0);
  c[static_cast<std::size_t>(axis)] = 1.0;
  return Direction(std::move(c));
}

Direction Direction::operator-() const {
  std::vector<double> c = coords_;
  for (double& x : c) x = -x;
  return Direction(std::move(c));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double distance(const Direction& a, const Direction& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Direction orthogonal_component(const Direction& v, const Direction& axis) {
  const double p = dot(v, axis);
  std::vector<double> c(v.coords().begin(), v.coords().end());
  for (int i = 0; i < v.dim(); ++i) c[i] -= p * axis[i];
  return Direction::normalized(std::move(c));
}

std::vector<double> DirectionSet::flat() const {
  std::vector<double> out;
  out.reserve(points.size() * static_cast<std::size_t>(dim));
  for (const auto& p : points) out.insert(out.end(), p.coords().begin(), p.coords().end());
  return out;
}

double min_pairwise_distance(const DirectionSet& set) {
  double best = INFINITY;
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t j = i + 1; j < set.size(); ++j) best = std::min(best, distance(set.points[i], set.points[j]));
  return best;
}

double max_pairwise_distance(const DirectionSet& set) {
  double best = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t j = i + 1; j < set.size(); ++j) best = std::max(best, distance(set.points[i], set.points[j]));
  return best;
}

bool satisfies_invariants(const DirectionSet& set) {
  const double min_sep = set.separation * (1.0 - kSeparationRelTol);
  const double max_diam = set.diameter_bound ? *set.diameter_bound * (1.0 + kSeparationRelTol) : INFINITY;
  for (const auto& p : set.points) {
    if (p.dim() != set.dim) return false;
    double n2 = 0.0;
    for (double c : p.coords()) n2 += c * c;
    if (std::abs(std::sqrt(n2) - 1.0) > 1e-12) return false;
  }
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      const double d = distance(set.points[i], set.points[j]);
      if (d < min_sep || d > max_diam) return false;
    }
  return true;
}

}  // namespace dirmax
