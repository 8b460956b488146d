#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "popnet/errors.hpp"

namespace popnet {

// Fenwick tree over nonnegative integer weights. Weighted draws and updates
// are O(log n) and use exact integer arithmetic, so repeated updates never
// drift the way cumulative floating-point scans do.
class PrefixSumTree {
 public:
  explicit PrefixSumTree(std::span<const std::int64_t> weights);

  std::int64_t size() const { return n_; }
  std::int64_t total() const { return total_; }

  void add(std::int64_t index, std::int64_t delta);

  // Sum of the first `count` weights (count in [0, n]).
  std::int64_t prefix(std::int64_t count) const;

  std::int64_t value(std::int64_t index) const {
    return prefix(index + 1) - prefix(index);
  }

  // Smallest index i with prefix(i+1) > r, for r in [0, total). This is the
  // weighted draw: feeding a uniform r selects i with probability w_i/total.
  std::int64_t find(std::int64_t r) const;

 private:
  std::int64_t n_ = 0;
  std::int64_t total_ = 0;
  std::int64_t top_bit_ = 0;
  std::vector<std::int64_t> tree_;  // 1-based
};

inline PrefixSumTree::PrefixSumTree(std::span<const std::int64_t> weights)
    : n_(static_cast<std::int64_t>(weights.size())), tree_(weights.size() + 1, 0) {
  for (std::int64_t i = 0; i < n_; ++i) {
    if (weights[i] < 0) fail(ErrorCode::kDomain, "PrefixSumTree: negative weight");
    tree_[i + 1] = weights[i];
    total_ += weights[i];
  }
  for (std::int64_t i = 1; i <= n_; ++i) {
    std::int64_t parent = i + (i & -i);
    if (parent <= n_) tree_[parent] += tree_[i];
  }
  top_bit_ = 1;
  while ((top_bit_ << 1) <= n_) top_bit_ <<= 1;
}

inline void PrefixSumTree::add(std::int64_t index, std::int64_t delta) {
  if (index < 0 || index >= n_) fail(ErrorCode::kDomain, "PrefixSumTree: index out of range");
  total_ += delta;
  for (std::int64_t i = index + 1; i <= n_; i += i & -i) tree_[i] += delta;
}

inline std::int64_t PrefixSumTree::prefix(std::int64_t count) const {
  if (count < 0 || count > n_) fail(ErrorCode::kDomain, "PrefixSumTree: prefix out of range");
  std::int64_t sum = 0;
  for (std::int64_t i = count; i > 0; i -= i & -i) sum += tree_[i];
  return sum;
}

inline std::int64_t PrefixSumTree::find(std::int64_t r) const {
  if (r < 0 || r >= total_) fail(ErrorCode::kDomain, "PrefixSumTree: draw out of range");
  std::int64_t index = 0;
  for (std::int64_t step = top_bit_; step > 0; step >>= 1) {
    std::int64_t next = index + step;
    if (next <= n_ && tree_[next] <= r) {
      index = next;
      r -= tree_[next];
    }
  }
  return index;  // weights past the last positive one are zero, so index < n
}

}  // namespace popnet
