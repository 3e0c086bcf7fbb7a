#ifndef N1L_CANON_HPP
#define N1L_CANON_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "n1l/config.hpp"
#include "n1l/perm_s4.hpp"
#include "n1l/signature_canon.hpp"
#include "n1l/validity.hpp"

namespace n1l {

/// Canonical representative and its key.
struct CanonicalForm {
  Configuration config;
  std::string key;
};

/// Computes the lexicographically greatest relabeling of a configuration.
///
/// Matrices are compared row-major: rows in class order, each row read from
/// column 0 (most significant) through column c-1. Row classes may only be
/// permuted by the signature achievers; rows may only move within their
/// class and columns only within their type block.
///
/// The search fixes output rows one at a time. The columns are kept as an
/// ordered partition into cells; a candidate row's best image packs its ones
/// to the left of every cell, and choosing it splits each cell into its
/// ones and zeros. Only candidates whose image equals the running best
/// prefix are explored further. A Canonicalizer holds scratch space and is
/// not shared between threads.
class Canonicalizer {
 public:
  static constexpr int kMaxRows = 64;
  static constexpr int kMaxClassRows = 24;

  explicit Canonicalizer(bool grouped_signature = false) : grouped_signature_(grouped_signature) {}

  /// Canonical key of the configuration given by rows grouped by class. When
  /// fixed_classes is set, only the identity class permutation is used.
  void canonical_key(std::span<const Row> rows, const RowPartition& partition, int cols, std::string& key,
                     bool fixed_classes = false) {
    run(rows, partition, cols, fixed_classes);
    key.clear();
    append_key_header(key, nrows_, cols_, out_partition_);
    for (int t = 0; t < nrows_; ++t) append_key_row(key, output_row(t), cols_);
  }

  Configuration canonical_config(const Configuration& cfg, bool fixed_classes = false) {
    run(cfg.rows(), cfg.partition(), cfg.num_cols(), fixed_classes);
    std::vector<Row> rows(nrows_);
    for (int t = 0; t < nrows_; ++t) rows[t] = output_row(t);
    return Configuration(cols_, out_partition_, std::move(rows));
  }

  /// Number of leaves reached by the last call (search-effort diagnostic).
  long leaves() const { return leaves_; }

 private:
  struct Level {
    int ncells = 0;
    std::array<Row, kMaxCols> cells;
    std::array<std::uint8_t, kMaxCols> sizes;
  };

  static Row shift_in(Row acc, int m, Row bits) { return (m >= 64 ? 0 : acc << m) | bits; }

  Row output_row(int t) const {
    if (cols_ == 0) return 0;
    // best_ stores column 0 in the most significant of cols_ bits.
    Row p = best_[t];
    Row out = 0;
    for (int j = 0; j < cols_; ++j)
      if ((p >> (cols_ - 1 - j)) & 1) out |= bit(j);
    return out;
  }

  void run(std::span<const Row> rows, const RowPartition& partition, int cols, bool fixed_classes) {
    if (static_cast<int>(rows.size()) > kMaxRows) throw Error(ErrorCode::TooLarge, "too many rows to canonicalize");
    for (int s : partition.sizes)
      if (s > kMaxClassRows) throw Error(ErrorCode::TooLarge, "class too large to canonicalize");
    nrows_ = static_cast<int>(rows.size());
    cols_ = cols;
    best_len_ = 0;
    leaves_ = 0;

    std::array<Row, kClassCount> support{};
    for (int k = 0; k < kClassCount; ++k)
      for (int i = partition.begin(k); i < partition.end(k); ++i) support[k] |= rows[i];
    std::array<unsigned, kMaxCols> types{};
    Signature sig;
    for (int j = 0; j < cols; ++j) {
      unsigned t = 0;
      for (int k = 0; k < kClassCount; ++k) t |= ((support[k] >> j) & 1U) << k;
      types[j] = t;
      if (t != 0) ++sig.counts[type_position(t)];
    }

    PermSet achievers = 1;
    if (!fixed_classes) {
      achievers = grouped_signature_ ? canonicalize_signature_grouped(sig).achievers
                                     : canonicalize_signature(sig).achievers;
    }

    bool first = true;
    for (PermSet rest = achievers; rest != 0; rest &= rest - 1) {
      const Perm4 alpha = Perm4::from_index(std::countr_zero(rest));
      RowPartition permuted;
      for (int k = 0; k < kClassCount; ++k) {
        const int target = alpha(k);
        permuted.sizes[target] = partition.sizes[k];
        class_count_[target] = partition.sizes[k];
        for (int i = 0; i < partition.sizes[k]; ++i) class_rows_[target][i] = rows[partition.begin(k) + i];
        used_[target] = 0;
      }
      if (first) {
        out_partition_ = permuted;
        first = false;
      }
      int t = 0;
      for (int k = 0; k < kClassCount; ++k)
        for (int i = 0; i < permuted.sizes[k]; ++i) depth_class_[t++] = k;

      std::array<Row, kTypeCount + 1> blocks{};
      for (int j = 0; j < cols; ++j) {
        const unsigned nt = apply_to_raw_type(alpha, types[j]);
        blocks[nt == 0 ? kTypeCount : type_position(nt)] |= bit(j);
      }
      Level& root = levels_[0];
      root.ncells = 0;
      for (Row b : blocks) {
        if (b == 0) continue;
        root.cells[root.ncells] = b;
        root.sizes[root.ncells] = static_cast<std::uint8_t>(popcount(b));
        ++root.ncells;
      }
      descend(0);
    }
  }

  void descend(int depth) {
    if (depth == nrows_) {
      ++leaves_;
      return;
    }
    const Level& level = levels_[depth];
    const int cls = depth_class_[depth];
    std::array<Row, kMaxClassRows> pattern{};
    Row max_pattern = 0;
    bool have = false;
    for (int i = 0; i < class_count_[cls]; ++i) {
      if ((used_[cls] >> i) & 1) continue;
      const Row row = class_rows_[cls][i];
      Row pat = 0;
      for (int c = 0; c < level.ncells; ++c) {
        const int m = level.sizes[c];
        const int p = popcount(row & level.cells[c]);
        pat = shift_in(pat, m, low_mask(p) << (m - p));
      }
      pattern[i] = pat;
      if (!have || pat > max_pattern) max_pattern = pat;
      have = true;
    }
    if (depth < best_len_) {
      if (max_pattern < best_[depth]) return;
      if (max_pattern > best_[depth]) {
        best_[depth] = max_pattern;
        best_len_ = depth + 1;
      }
    } else {
      best_[depth] = max_pattern;
      best_len_ = depth + 1;
    }

    Level& next = levels_[depth + 1];
    for (int i = 0; i < class_count_[cls]; ++i) {
      if (((used_[cls] >> i) & 1) || pattern[i] != max_pattern) continue;
      const Row row = class_rows_[cls][i];
      next.ncells = 0;
      for (int c = 0; c < level.ncells; ++c) {
        const Row in = level.cells[c] & row;
        const Row out = level.cells[c] & ~row;
        if (in) {
          next.cells[next.ncells] = in;
          next.sizes[next.ncells++] = static_cast<std::uint8_t>(popcount(in));
        }
        if (out) {
          next.cells[next.ncells] = out;
          next.sizes[next.ncells++] = static_cast<std::uint8_t>(popcount(out));
        }
      }
      used_[cls] |= 1U << i;
      descend(depth + 1);
      used_[cls] &= ~(1U << i);
    }
  }

  bool grouped_signature_;
  int nrows_ = 0;
  int cols_ = 0;
  int best_len_ = 0;
  long leaves_ = 0;
  RowPartition out_partition_;
  std::array<Row, kMaxRows> best_{};
  std::array<int, kMaxRows> depth_class_{};
  std::array<std::array<Row, kMaxClassRows>, kClassCount> class_rows_{};
  std::array<int, kClassCount> class_count_{};
  std::array<std::uint32_t, kClassCount> used_{};
  std::array<Level, kMaxRows + 1> levels_{};
};

/// M^cf: greatest block-preserving relabeling with the class order fixed.
inline Configuration canonical_form_fixed_classes(const Configuration& cfg) {
  Canonicalizer canon;
  return canon.canonical_config(cfg, true);
}

/// M^c: greatest M^cf over all class permutations achieving the
/// canonicalized signature.
inline CanonicalForm canonical_form(const Configuration& cfg) {
  if (!is_valid_n1_prime(cfg)) throw Error(ErrorCode::InvalidConfiguration, "not a valid N1' configuration");
  Canonicalizer canon;
  CanonicalForm out{canon.canonical_config(cfg), {}};
  out.key = encode_key(out.config);
  return out;
}

/// Exhaustive reference for canonical_form on small inputs. Tries every
/// class permutation whose image signature is the greatest, and every
/// within-class row order; for a fixed row order the best column order in a
/// type block is its columns sorted by descending column vector.
inline Configuration brute_force_canonical(const Configuration& cfg) {
  const int r = cfg.num_rows(), c = cfg.num_cols();
  if (r > 5 || c > 9) throw Error(ErrorCode::TooLarge, "brute force limited to r <= 5, c <= 9");

  // Column types read straight off the rows.
  std::vector<unsigned> types(c, 0);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j)
      if ((cfg.row(i) >> j) & 1) types[j] |= 1U << cfg.class_of(i);

  auto permuted_signature = [&](const std::array<int, 4>& images) {
    std::array<int, kTypeCount> counts{};
    for (int j = 0; j < c; ++j) {
      unsigned t = 0;
      for (int k = 0; k < 4; ++k)
        if ((types[j] >> k) & 1) t |= 1U << images[k];
      if (t != 0) ++counts[type_position(t)];
    }
    return counts;
  };

  std::vector<std::array<int, 4>> all_images;
  std::array<int, 4> im{0, 1, 2, 3};
  do all_images.push_back(im);
  while (std::next_permutation(im.begin(), im.end()));
  std::array<int, kTypeCount> best_sig{};
  for (const auto& a : all_images) best_sig = std::max(best_sig, permuted_signature(a));

  std::vector<Row> best;  // rows as MSB-first column strings
  RowPartition best_partition;
  bool have = false;
  for (const auto& a : all_images) {
    if (permuted_signature(a) != best_sig) continue;
    // Rows of new class a(k) are the rows of old class k.
    std::array<std::vector<int>, 4> members;
    RowPartition p;
    for (int i = 0; i < r; ++i) members[a[cfg.class_of(i)]].push_back(i);
    for (int k = 0; k < 4; ++k) p.sizes[k] = static_cast<int>(members[k].size());
    std::vector<int> col_block(c);
    for (int j = 0; j < c; ++j) {
      unsigned t = 0;
      for (int k = 0; k < 4; ++k)
        if ((types[j] >> k) & 1) t |= 1U << a[k];
      col_block[j] = t == 0 ? kTypeCount : type_position(t);
    }
    for (auto& m : members) std::sort(m.begin(), m.end());
    // Odometer over the within-class orders.
    while (true) {
      std::vector<int> order;
      for (const auto& m : members) order.insert(order.end(), m.begin(), m.end());
      // Column vector with row 0 most significant.
      std::vector<std::pair<int, Row>> cols;
      for (int j = 0; j < c; ++j) {
        Row v = 0;
        for (int t = 0; t < r; ++t) v = (v << 1) | ((cfg.row(order[t]) >> j) & 1);
        cols.emplace_back(col_block[j], v);
      }
      std::sort(cols.begin(), cols.end(), [](const auto& x, const auto& y) {
        return x.first != y.first ? x.first < y.first : x.second > y.second;
      });
      std::vector<Row> mat(r, 0);
      for (int t = 0; t < r; ++t)
        for (int j = 0; j < c; ++j) mat[t] = (mat[t] << 1) | ((cols[j].second >> (r - 1 - t)) & 1);
      if (!have || mat > best) {
        best = mat;
        best_partition = p;
        have = true;
      }
      int k = 0;
      for (; k < 4; ++k) {
        if (std::next_permutation(members[k].begin(), members[k].end())) break;
      }
      if (k == 4) break;
    }
  }
  std::vector<Row> rows(r, 0);
  for (int t = 0; t < r; ++t)
    for (int j = 0; j < c; ++j)
      if ((best[t] >> (c - 1 - j)) & 1) rows[t] |= bit(j);
  return Configuration(c, best_partition, std::move(rows));
}

}  // namespace n1l

#endif  // N1L_CANON_HPP
