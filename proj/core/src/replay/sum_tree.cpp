#include "rrlab/replay/sum_tree.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "rrlab/errors.hpp"
#include "rrlab/io/binio.hpp"

namespace rrlab::replay {

namespace {
constexpr uint32_t kMagic = 0x52525354;  // "RRST"
}

SumTree::SumTree(int64_t leaf_count) {
  if (leaf_count <= 0) throw ParameterError("sum tree needs a positive leaf count");
  capacity_ = 1;
  while (capacity_ < leaf_count) capacity_ *= 2;
  sum_.assign(static_cast<size_t>(2 * capacity_), 0.0);
  max_.assign(static_cast<size_t>(2 * capacity_), 0.0);
}

void SumTree::set(int64_t leaf_index, double priority) {
  if (leaf_index < 0 || leaf_index >= capacity_)
    throw ContractViolation("sum tree leaf index out of range");
  if (!(priority >= 0.0) || !std::isfinite(priority))
    throw ParameterError("priority must be finite and non-negative");
  int64_t i = first_leaf() + leaf_index;
  sum_[static_cast<size_t>(i)] = priority;
  max_[static_cast<size_t>(i)] = priority;
  for (i /= 2; i >= 1; i /= 2) {
    size_t l = static_cast<size_t>(2 * i), r = l + 1;
    sum_[static_cast<size_t>(i)] = sum_[l] + sum_[r];
    max_[static_cast<size_t>(i)] = std::max(max_[l], max_[r]);
  }
}

int64_t SumTree::sample(double u) const {
  if (!(u >= 0.0) || !(u < total()))
    throw ContractViolation("sum tree sample point outside [0, total)");
  int64_t i = 1;
  while (i < first_leaf()) {
    size_t l = static_cast<size_t>(2 * i);
    if (u < sum_[l]) {
      i = 2 * i;
    } else {
      u -= sum_[l];
      i = 2 * i + 1;
    }
  }
  return i - first_leaf();
}

void SumTree::save(std::ostream& os) const {
  io::put_u32(os, kMagic);
  io::put_u32(os, 1);
  io::put_i64(os, capacity_);
  // Leaves only; internal nodes are rebuilt on load.
  for (int64_t i = 0; i < capacity_; ++i) io::put_f64(os, leaf(i));
}

SumTree SumTree::load(std::istream& is) {
  io::expect_magic(is, kMagic, "sum tree");
  if (io::get_u32(is) != 1) throw IoError("unsupported sum tree snapshot version");
  int64_t capacity = io::get_i64(is);
  SumTree t(capacity);
  for (int64_t i = 0; i < capacity; ++i) t.set(i, io::get_f64(is));
  return t;
}

}  // namespace rrlab::replay
