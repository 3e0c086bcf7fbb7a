#ifndef N1L_SIGNATURE_CANON_HPP
#define N1L_SIGNATURE_CANON_HPP

#include <algorithm>
#include <array>
#include <bit>

#include "n1l/config.hpp"
#include "n1l/perm_s4.hpp"

namespace n1l {

struct SignatureCanonResult {
  Signature canonical;
  CosetHandle coset;
  PermSet achievers = 0;  // every alpha with sigma_alpha == canonical
};

/// Lexicographically greatest image of s under the class action, found by
/// trying all 24 permutations.
inline SignatureCanonResult canonicalize_signature(const Signature& s) {
  SignatureCanonResult res;
  res.canonical = s;
  res.achievers = 1;
  for (int a = 1; a < kS4Order; ++a) {
    Signature img = apply_to_signature(Perm4::from_index(a), s);
    if (img > res.canonical) {
      res.canonical = img;
      res.achievers = PermSet{1} << a;
    } else if (img == res.canonical) {
      res.achievers |= PermSet{1} << a;
    }
  }
  res.coset = identify_coset(res.achievers);
  return res;
}

/// Same result as canonicalize_signature, computed one weight group at a
/// time: weight 4 (fixed by everything), weight 3 (from the sorted counts),
/// then weights 2 and 1 by trying the surviving candidates.
inline SignatureCanonResult canonicalize_signature_grouped(const Signature& s) {
  // Weight-3 type missing class m is 0xF ^ (1 << m); in signature order the
  // weight-3 slots q = 0..3 hold the types missing class 3 - q.
  std::array<int, 4> missing_count{};
  for (int m = 0; m < 4; ++m) missing_count[m] = s.count_of(0xF ^ (1U << m));
  std::array<int, 4> by_rank{0, 1, 2, 3};
  std::stable_sort(by_rank.begin(), by_rank.end(),
                   [&](int x, int y) { return missing_count[x] > missing_count[y]; });
  std::array<int, 4> base_images{};
  std::array<int, 4> part_of_target{};
  int part = 0;
  for (int q = 0; q < 4; ++q) {
    if (q > 0 && missing_count[by_rank[q]] != missing_count[by_rank[q - 1]]) ++part;
    base_images[by_rank[q]] = 3 - q;
    part_of_target[3 - q] = part;
  }
  const Perm4 base = Perm4::from_images(base_images);

  // Young subgroup of the </= pattern over the sorted weight-3 counts.
  PermSet candidates = 0;
  for (int y = 0; y < kS4Order; ++y) {
    Perm4 py = Perm4::from_index(y);
    bool keeps_parts = true;
    for (int x = 0; x < 4; ++x) keeps_parts = keeps_parts && part_of_target[py(x)] == part_of_target[x];
    if (keeps_parts) candidates |= PermSet{1} << compose(py, base).index();
  }

  auto refine = [&](int first, int last) {
    std::array<int, kTypeCount> best{};
    PermSet kept = 0;
    bool have = false;
    for (PermSet rest = candidates; rest != 0; rest &= rest - 1) {
      int a = std::countr_zero(rest);
      Signature img = apply_to_signature(Perm4::from_index(a), s);
      std::array<int, kTypeCount> part_counts{};
      std::copy(img.counts.begin() + first, img.counts.begin() + last, part_counts.begin());
      if (!have || part_counts > best) {
        best = part_counts;
        kept = PermSet{1} << a;
        have = true;
      } else if (part_counts == best) {
        kept |= PermSet{1} << a;
      }
    }
    candidates = kept;
  };
  refine(5, 11);   // weight 2
  refine(11, 15);  // weight 1

  SignatureCanonResult res;
  res.achievers = candidates;
  res.canonical = apply_to_signature(Perm4::from_index(std::countr_zero(candidates)), s);
  res.coset = identify_coset(candidates);
  return res;
}

}  // namespace n1l

#endif  // N1L_SIGNATURE_CANON_HPP
