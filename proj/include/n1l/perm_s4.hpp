#ifndef N1L_PERM_S4_HPP
#define N1L_PERM_S4_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "n1l/config.hpp"
#include "n1l/error.hpp"

namespace n1l {

/// A set of S4 elements, bit i = element with index i.
using PermSet = std::uint32_t;

inline constexpr int kS4Order = 24;
inline constexpr PermSet kAllPerms = (PermSet{1} << kS4Order) - 1;

namespace detail {

struct S4Tables {
  std::array<std::array<std::uint8_t, 4>, kS4Order> images{};
  std::array<std::int8_t, 256> index_of_code{};
  std::array<std::array<std::uint8_t, kS4Order>, kS4Order> compose{};
  std::array<std::uint8_t, kS4Order> inverse{};
  std::array<std::array<std::uint8_t, 16>, kS4Order> type_image{};
  std::vector<PermSet> subgroups;  // sorted by (order, mask)
  struct CosetEntry {
    int subgroup;
    int representative;
  };
  std::unordered_map<PermSet, CosetEntry> cosets;

  static int code(const std::array<std::uint8_t, 4>& a) { return a[0] + 4 * a[1] + 16 * a[2] + 64 * a[3]; }

  S4Tables() {
    // Recursive order: S_{k+1} lists tau_b * p for b = 0..k, p in S_k, where
    // tau_0 = id and tau_b swaps k and k-b. The first 6 elements fix 3.
    std::vector<std::array<std::uint8_t, 4>> perms{{0, 1, 2, 3}};
    for (int k = 1; k < 4; ++k) {
      std::vector<std::array<std::uint8_t, 4>> next;
      for (int b = 0; b <= k; ++b) {
        for (const auto& p : perms) {
          auto q = p;
          if (b > 0)
            for (auto& x : q) {
              if (x == k) x = static_cast<std::uint8_t>(k - b);
              else if (x == k - b) x = static_cast<std::uint8_t>(k);
            }
          next.push_back(q);
        }
      }
      perms = std::move(next);
    }
    index_of_code.fill(-1);
    for (int i = 0; i < kS4Order; ++i) {
      images[i] = perms[i];
      index_of_code[code(perms[i])] = static_cast<std::int8_t>(i);
    }
    for (int a = 0; a < kS4Order; ++a) {
      for (int b = 0; b < kS4Order; ++b) {
        std::array<std::uint8_t, 4> ab{};
        for (int i = 0; i < 4; ++i) ab[i] = images[a][images[b][i]];
        compose[a][b] = static_cast<std::uint8_t>(index_of_code[code(ab)]);
      }
      for (int t = 0; t < 16; ++t) {
        unsigned out = 0;
        for (int i = 0; i < 4; ++i)
          if ((t >> i) & 1) out |= 1U << images[a][i];
        type_image[a][t] = static_cast<std::uint8_t>(out);
      }
    }
    for (int a = 0; a < kS4Order; ++a)
      for (int b = 0; b < kS4Order; ++b)
        if (compose[a][b] == 0) inverse[a] = static_cast<std::uint8_t>(b);

    // Every subgroup of S4 is generated by at most two elements.
    std::vector<PermSet> found;
    for (int g1 = 0; g1 < kS4Order; ++g1)
      for (int g2 = g1; g2 < kS4Order; ++g2) found.push_back(closure((PermSet{1} << g1) | (PermSet{1} << g2)));
    std::sort(found.begin(), found.end(), [](PermSet x, PermSet y) {
      int ox = std::popcount(x), oy = std::popcount(y);
      return ox != oy ? ox < oy : x < y;
    });
    found.erase(std::unique(found.begin(), found.end()), found.end());
    subgroups = found;

    for (int h = 0; h < static_cast<int>(subgroups.size()); ++h) {
      for (int g = 0; g < kS4Order; ++g) {
        PermSet coset = 0;
        for (int e = 0; e < kS4Order; ++e)
          if ((subgroups[h] >> e) & 1) coset |= PermSet{1} << compose[e][g];
        cosets.emplace(coset, CosetEntry{h, std::countr_zero(coset)});
      }
    }
  }

  PermSet closure(PermSet gens) const {
    PermSet group = 1 | gens;  // identity has index 0
    for (bool grew = true; grew;) {
      grew = false;
      for (int a = 0; a < kS4Order; ++a) {
        if (!((group >> a) & 1)) continue;
        for (int b = 0; b < kS4Order; ++b) {
          if (!((group >> b) & 1)) continue;
          PermSet ab = PermSet{1} << compose[a][b];
          if (!(group & ab)) {
            group |= ab;
            grew = true;
          }
        }
      }
    }
    return group;
  }
};

inline const S4Tables& s4_tables() {
  static const S4Tables tables;
  return tables;
}

}  // namespace detail

/// An element of S4 acting on the row classes {0,1,2,3}; stored as its
/// index in the fixed recursive order (index 0 is the identity).
class Perm4 {
 public:
  constexpr Perm4() = default;

  static Perm4 from_index(int index) {
    if (index < 0 || index >= kS4Order) throw Error(ErrorCode::InvalidArgument, "perm index out of range");
    return Perm4(static_cast<std::uint8_t>(index));
  }

  /// images[i] = alpha(i); must be a bijection on {0,1,2,3}.
  static Perm4 from_images(const std::array<int, 4>& images) {
    std::array<std::uint8_t, 4> a{};
    for (int i = 0; i < 4; ++i) {
      if (images[i] < 0 || images[i] > 3) throw Error(ErrorCode::InvalidArgument, "image out of range");
      a[i] = static_cast<std::uint8_t>(images[i]);
    }
    int idx = detail::s4_tables().index_of_code[detail::S4Tables::code(a)];
    if (idx < 0) throw Error(ErrorCode::InvalidArgument, "images are not a bijection");
    return Perm4(static_cast<std::uint8_t>(idx));
  }

  /// The transposition swapping i and j.
  static Perm4 transposition(int i, int j) {
    std::array<int, 4> a{0, 1, 2, 3};
    std::swap(a[i], a[j]);
    return from_images(a);
  }

  static constexpr Perm4 identity() { return Perm4(); }

  int index() const { return index_; }
  int operator()(int i) const { return detail::s4_tables().images[index_][i]; }
  std::array<int, 4> images() const {
    const auto& im = detail::s4_tables().images[index_];
    return {im[0], im[1], im[2], im[3]};
  }

  friend constexpr bool operator==(Perm4, Perm4) = default;

 private:
  constexpr explicit Perm4(std::uint8_t index) : index_(index) {}
  std::uint8_t index_ = 0;
};

/// result(i) = a(b(i)).
inline Perm4 compose(Perm4 a, Perm4 b) {
  return Perm4::from_index(detail::s4_tables().compose[a.index()][b.index()]);
}

inline Perm4 inverse(Perm4 a) { return Perm4::from_index(detail::s4_tables().inverse[a.index()]); }

/// Raw 4-bit action, accepting type 0 (mapped to 0).
inline unsigned apply_to_raw_type(Perm4 a, unsigned type) { return detail::s4_tables().type_image[a.index()][type & 0xF]; }

inline ColumnType apply_to_type(Perm4 a, ColumnType t) { return ColumnType(apply_to_raw_type(a, t.value())); }

/// sigma_a(a[T]) = sigma(T).
inline Signature apply_to_signature(Perm4 a, const Signature& s) {
  Signature out;
  const auto& img = detail::s4_tables().type_image[a.index()];
  for (int p = 0; p < kTypeCount; ++p) out.counts[type_position(img[kTypeOrder[p]])] = s.counts[p];
  return out;
}

/// Identifies a right coset Hg by subgroup index and least-index member.
struct CosetHandle {
  int subgroup = 0;
  Perm4 representative;
  friend bool operator==(const CosetHandle&, const CosetHandle&) = default;
};

inline const std::vector<PermSet>& s4_subgroups() { return detail::s4_tables().subgroups; }

inline int s4_coset_count() { return static_cast<int>(detail::s4_tables().cosets.size()); }

inline CosetHandle identify_coset(PermSet mask) {
  const auto& cosets = detail::s4_tables().cosets;
  auto it = cosets.find(mask);
  if (it == cosets.end()) throw Error(ErrorCode::NotACoset, "permutation set is not a right coset of a subgroup");
  return {it->second.subgroup, Perm4::from_index(it->second.representative)};
}

/// All masks accepted by identify_coset.
inline std::vector<PermSet> all_cosets() {
  std::vector<PermSet> out;
  for (const auto& [mask, entry] : detail::s4_tables().cosets) out.push_back(mask);
  std::sort(out.begin(), out.end());
  return out;
}

/// Histogram of subgroup orders.
inline std::map<int, int> subgroup_order_census() {
  std::map<int, int> census;
  for (PermSet h : s4_subgroups()) ++census[std::popcount(h)];
  return census;
}

}  // namespace n1l

#endif  // N1L_PERM_S4_HPP
