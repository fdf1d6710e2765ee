#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace rrlab::replay {

/// Complete binary tree over leaf priorities supporting O(log n) updates,
/// prefix-sum sampling, and a max aggregate (used for the default priority
/// of fresh transitions). Internal sums are recomputed from children on
/// every update, so parent == left + right holds exactly, not just within
/// accumulated drift.
class SumTree {
public:
  SumTree() = default;
  explicit SumTree(int64_t leaf_count);

  int64_t capacity() const { return capacity_; }  // power of two >= leaf count
  double total() const { return sum_.empty() ? 0.0 : sum_[1]; }
  double max_leaf() const { return max_.empty() ? 0.0 : max_[1]; }
  double leaf(int64_t i) const { return sum_[static_cast<size_t>(first_leaf() + i)]; }

  // Priorities must be >= 0 and finite.
  void set(int64_t leaf_index, double priority);

  // Leaf whose prefix-sum interval contains u; requires 0 <= u < total().
  int64_t sample(double u) const;

  void save(std::ostream& os) const;
  static SumTree load(std::istream& is);

private:
  int64_t first_leaf() const { return capacity_; }

  int64_t capacity_ = 0;
  std::vector<double> sum_;  // 1-based heap layout, sum_[1] is the root
  std::vector<double> max_;
};

}  // namespace rrlab::replay
