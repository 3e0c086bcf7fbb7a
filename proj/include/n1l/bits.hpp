#ifndef N1L_BITS_HPP
#define N1L_BITS_HPP

#include <bit>
#include <cstdint>

namespace n1l {

/// A row (or column set) of at most 64 columns; bit j is column j.
using Row = std::uint64_t;

inline constexpr int kMaxCols = 64;

constexpr Row bit(int j) { return Row{1} << j; }

constexpr Row low_mask(int n) { return n >= 64 ? ~Row{0} : (Row{1} << n) - 1; }

constexpr int popcount(Row x) { return std::popcount(x); }

/// Calls f(j) for every set bit j in ascending order.
template <class F>
constexpr void for_each_bit(Row x, F&& f) {
  while (x != 0) {
    f(std::countr_zero(x));
    x &= x - 1;
  }
}

}  // namespace n1l

#endif  // N1L_BITS_HPP
