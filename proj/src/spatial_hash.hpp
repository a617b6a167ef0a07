#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace dirmax::detail {

// Uniform bucket grid over [-1, 1]^dim with cell side `cell`. Any two points
// within `cell` of each other sit in adjacent (3^dim neighborhood) buckets.
class SpatialHash {
 public:
  SpatialHash(int dim, double cell) : dim_(dim), cell_(cell) {
    if (dim < 1 || dim > 8) throw std::invalid_argument("spatial hash supports 1..8 dimensions");
    base_ = static_cast<std::int64_t>(std::ceil(2.0 / cell)) + 3;
    double total = std::pow(static_cast<double>(base_), dim);
    dense_ = total <= static_cast<double>(1 << 25);
    if (dense_) head_.assign(static_cast<std::size_t>(total), -1);
  }

  void insert(int id, std::span<const double> p) {
    const std::int64_t k = key_of(p, nullptr);
    if (static_cast<std::size_t>(id) >= next_.size()) next_.resize(static_cast<std::size_t>(id) + 1, -1);
    if (dense_) {
      next_[id] = head_[static_cast<std::size_t>(k)];
      head_[static_cast<std::size_t>(k)] = id;
    } else {
      auto& h = sparse_.try_emplace(k, -1).first->second;
      next_[id] = h;
      h = id;
    }
  }

  // Calls fn(id) for every stored id in the 3^dim neighborhood of p. Returning
  // true from fn stops the scan early.
  template <class Fn>
  bool any_near(std::span<const double> p, Fn&& fn) const {
    std::int64_t cell[8];
    key_of(p, cell);
    std::int64_t off[8];
    for (int i = 0; i < dim_; ++i) off[i] = -1;
    while (true) {
      std::int64_t k = 0;
      bool inside = true;
      for (int i = 0; i < dim_; ++i) {
        const std::int64_t c = cell[i] + off[i];
        if (c < 0 || c >= base_) {
          inside = false;
          break;
        }
        k = k * base_ + c;
      }
      if (inside) {
        int id = bucket_head(k);
        while (id >= 0) {
          if (fn(id)) return true;
          id = next_[static_cast<std::size_t>(id)];
        }
      }
      int i = dim_ - 1;
      while (i >= 0 && off[i] == 1) off[i--] = -1;
      if (i < 0) break;
      ++off[i];
    }
    return false;
  }

 private:
  std::int64_t key_of(std::span<const double> p, std::int64_t* cells) const {
    std::int64_t k = 0;
    for (int i = 0; i < dim_; ++i) {
      std::int64_t c = static_cast<std::int64_t>(std::floor((p[i] + 1.0) / cell_)) + 1;
      if (c < 0) c = 0;
      if (c >= base_) c = base_ - 1;
      if (cells) cells[i] = c;
      k = k * base_ + c;
    }
    return k;
  }

  int bucket_head(std::int64_t k) const {
    if (dense_) return head_[static_cast<std::size_t>(k)];
    auto it = sparse_.find(k);
    return it == sparse_.end() ? -1 : it->second;
  }

  int dim_;
  double cell_;
  std::int64_t base_;
  bool dense_;
  std::vector<int> head_;
  std::vector<int> next_;
  std::unordered_map<std::int64_t, int> sparse_;
};

}  // namespace dirmax::detail
