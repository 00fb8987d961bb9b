#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "perc/errors.hpp"

namespace perc {

// One lattice row, bit-packed over its in-parity columns. Bit k of the
// row stands for column base() + 2k; base() carries the row's parity, so
// off-parity columns are unrepresentable by construction.
class RowOccupancy {
 public:
  RowOccupancy() = default;

  // Empty row covering the in-parity columns of [col_lo, col_hi].
  RowOccupancy(std::int64_t row, std::int64_t col_lo, std::int64_t col_hi) : row_(row) {
    base_ = col_lo + (((col_lo ^ row) & 1) ? 1 : 0);
    slots_ = base_ > col_hi ? 0 : (col_hi - base_) / 2 + 1;
    words_.assign((slots_ + 63) / 64, 0);
  }

  std::int64_t row() const { return row_; }
  int parity() const { return static_cast<int>(row_ & 1); }
  std::int64_t base() const { return base_; }
  std::int64_t col_hi() const { return base_ + 2 * (slots_ - 1); }
  std::int64_t slots() const { return slots_; }

  bool in_window(std::int64_t col) const {
    return col >= base_ && col <= col_hi() && ((col ^ base_) & 1) == 0;
  }

  bool test(std::int64_t col) const {
    if (!in_window(col)) return false;
    const std::int64_t k = (col - base_) / 2;
    return (words_[k >> 6] >> (k & 63)) & 1;
  }

  void set(std::int64_t col) {
    const std::int64_t k = (col - base_) / 2;
    words_[k >> 6] |= std::uint64_t{1} << (k & 63);
  }

  bool empty() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  std::int64_t count() const {
    std::int64_t c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }

  std::optional<std::int64_t> right_edge() const {
    for (std::int64_t i = static_cast<std::int64_t>(words_.size()) - 1; i >= 0; --i) {
      if (words_[i]) {
        const int b = 63 - std::countl_zero(words_[i]);
        return base_ + 2 * (64 * i + b);
      }
    }
    return std::nullopt;
  }

  std::optional<std::int64_t> left_edge() const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (words_[i]) {
        const int b = std::countr_zero(words_[i]);
        return base_ + 2 * (64 * static_cast<std::int64_t>(i) + b);
      }
    }
    return std::nullopt;
  }

  // Visits set columns in ascending order.
  template <class F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t w = words_[i];
      while (w) {
        const int b = std::countr_zero(w);
        f(base_ + 2 * (64 * static_cast<std::int64_t>(i) + b));
        w &= w - 1;
      }
    }
  }

  std::vector<std::int64_t> columns() const {
    std::vector<std::int64_t> out;
    out.reserve(static_cast<std::size_t>(count()));
    for_each([&](std::int64_t c) { out.push_back(c); });
    return out;
  }

  std::span<const std::uint64_t> words() const { return words_; }

 private:
  std::int64_t row_ = 0;
  std::int64_t base_ = 0;
  std::int64_t slots_ = 0;
  std::vector<std::uint64_t> words_;
};

// a subset of b as column sets (windows may differ).
inline bool is_subset(const RowOccupancy& a, const RowOccupancy& b) {
  bool ok = true;
  a.for_each([&](std::int64_t c) {
    if (!b.test(c)) ok = false;
  });
  return ok;
}

inline bool same_occupancy(const RowOccupancy& a, const RowOccupancy& b) {
  return is_subset(a, b) && is_subset(b, a);
}

// Columns shifted so the right edge sits at 0.
inline std::vector<std::int64_t> normalize(const RowOccupancy& row) {
  const auto r = row.right_edge();
  if (!r) raise(Errc::EmptySet, "normalize: empty row");
  std::vector<std::int64_t> out;
  row.for_each([&](std::int64_t c) { out.push_back(c - *r); });
  return out;
}

}  // namespace perc
