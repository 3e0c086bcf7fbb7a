#ifndef N1L_GF2_CODE_HPP
#define N1L_GF2_CODE_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "n1l/config.hpp"
#include "n1l/validity.hpp"

namespace n1l {

/// A word of length c+5: body columns 0..c-1, then anchor columns a0..a3
/// (anchor bits 0..3) and the shared column i (anchor bit 4).
struct EmbeddedWord {
  Row body = 0;
  std::uint8_t anchor = 0;

  static constexpr std::uint8_t kShared = 1U << 4;

  int weight() const { return popcount(body) + std::popcount(static_cast<unsigned>(anchor)); }
  bool is_zero() const { return body == 0 && anchor == 0; }
  EmbeddedWord& operator^=(const EmbeddedWord& o) {
    body ^= o.body;
    anchor ^= o.anchor;
    return *this;
  }
  friend EmbeddedWord operator^(EmbeddedWord a, const EmbeddedWord& b) { return a ^= b; }
  friend bool operator==(const EmbeddedWord&, const EmbeddedWord&) = default;

  /// Support as positions in 0..c+4.
  std::vector<int> support(int cols) const {
    std::vector<int> out;
    for_each_bit(body, [&](int j) { out.push_back(j); });
    for (int k = 0; k < 5; ++k)
      if ((anchor >> k) & 1) out.push_back(cols + k);
    return out;
  }
};

/// The embedded word for a row of class cls: body plus {a_cls, i}.
inline EmbeddedWord embed_row(Row body, int cls) {
  return {body, static_cast<std::uint8_t>((1U << cls) | EmbeddedWord::kShared)};
}

/// The anchor vector v = {a0, a1, a2, a3, i}.
inline constexpr EmbeddedWord kAnchorWord{0, 0x1F};

struct Embedding {
  int cols = 0;
  std::vector<EmbeddedWord> rows;
  EmbeddedWord anchor = kAnchorWord;

  /// Rows followed by the anchor vector.
  std::vector<EmbeddedWord> generators() const {
    auto gens = rows;
    gens.push_back(anchor);
    return gens;
  }
};

inline Embedding embed(const Configuration& cfg) {
  if (!is_valid_n1_prime(cfg)) throw Error(ErrorCode::InvalidConfiguration, "not a valid N1' configuration");
  Embedding e;
  e.cols = cfg.num_cols();
  for (int i = 0; i < cfg.num_rows(); ++i) e.rows.push_back(embed_row(cfg.row(i), cfg.class_of(i)));
  return e;
}

struct SpanReport {
  int min_weight = 0;
  int rank = 0;
  EmbeddedWord witness;
};

inline constexpr int kMaxGenerators = 40;

inline int gf2_rank(std::span<const EmbeddedWord> gens) {
  using Wide = unsigned __int128;
  std::vector<Wide> basis;
  for (const auto& g : gens) {
    Wide v = static_cast<Wide>(g.body) | (static_cast<Wide>(g.anchor) << 64);
    for (Wide b : basis) {
      // b's leading bit is its highest set bit
      int lead = b >> 64 ? 64 + 63 - std::countl_zero(static_cast<std::uint64_t>(b >> 64))
                         : 63 - std::countl_zero(static_cast<std::uint64_t>(b));
      if ((v >> lead) & 1) v ^= b;
    }
    if (v != 0) {
      basis.push_back(v);
      std::sort(basis.begin(), basis.end(), std::greater<>());
    }
  }
  return static_cast<int>(basis.size());
}

/// Minimum Hamming weight over the nonzero codewords of the span, visiting
/// all 2^g - 1 nonzero combinations in Gray-code order. Combinations that
/// cancel to zero (dependent generators) are not codewords and are skipped;
/// if the span is {0} the minimum weight is reported as 0.
inline SpanReport span_min_weight(std::span<const EmbeddedWord> gens) {
  if (gens.empty()) throw Error(ErrorCode::InvalidArgument, "empty generator list");
  if (gens.size() > kMaxGenerators) throw Error(ErrorCode::TooLarge, "too many generators for exhaustive span");
  SpanReport rep;
  rep.rank = gf2_rank(gens);
  rep.min_weight = 0;
  EmbeddedWord acc;
  const std::uint64_t total = std::uint64_t{1} << gens.size();
  for (std::uint64_t step = 1; step < total; ++step) {
    acc ^= gens[std::countr_zero(step)];
    if (acc.is_zero()) continue;
    const int w = acc.weight();
    if (rep.min_weight == 0 || w < rep.min_weight) {
      rep.min_weight = w;
      rep.witness = acc;
    }
  }
  return rep;
}

namespace detail {
/// True iff some nonzero word start + (combination of gens) has weight
/// <= limit; start alone counts when include_start is set.
inline bool span_reaches_weight(std::span<const EmbeddedWord> gens, EmbeddedWord start, bool include_start,
                                int limit) {
  if (gens.size() > kMaxGenerators) throw Error(ErrorCode::TooLarge, "too many generators for exhaustive span");
  if (include_start && !start.is_zero() && start.weight() <= limit) return true;
  EmbeddedWord acc = start;
  const std::uint64_t total = std::uint64_t{1} << gens.size();
  for (std::uint64_t step = 1; step < total; ++step) {
    acc ^= gens[std::countr_zero(step)];
    if (!acc.is_zero() && acc.weight() <= limit) return true;
  }
  return false;
}
}  // namespace detail

/// The rows and anchor vector span a code of minimum weight 5.
inline bool is_n1l(const Configuration& cfg) {
  auto gens = embed(cfg).generators();
  return !detail::span_reaches_weight(gens, EmbeddedWord{}, false, 4);
}

/// Decides is_n1l for parent plus one new row, given that parent is already
/// N1L: only sums containing the new row are enumerated. A new row already
/// in the parent's span leaves the code unchanged.
inline bool is_n1l_incremental(const Configuration& parent, Row new_row, int new_class) {
  if (new_class < 0 || new_class >= kClassCount) throw Error(ErrorCode::InvalidArgument, "class out of range");
  const int cols = std::max(parent.num_cols(), new_row == 0 ? 0 : 64 - std::countl_zero(new_row));
  std::vector<std::pair<int, std::vector<int>>> rows;
  for (int i = 0; i < parent.num_rows(); ++i) {
    std::vector<int> cs;
    for_each_bit(parent.row(i), [&](int j) { cs.push_back(j); });
    rows.emplace_back(parent.class_of(i), std::move(cs));
  }
  std::vector<int> cs;
  for_each_bit(new_row, [&](int j) { cs.push_back(j); });
  rows.emplace_back(new_class, std::move(cs));
  if (!is_valid_n1_prime(Configuration::from_rows(cols, std::move(rows))))
    throw Error(ErrorCode::InvalidConfiguration, "extension is not a valid N1' configuration");

  std::vector<EmbeddedWord> gens;
  for (int i = 0; i < parent.num_rows(); ++i) gens.push_back(embed_row(parent.row(i), parent.class_of(i)));
  gens.push_back(kAnchorWord);
  return !detail::span_reaches_weight(gens, embed_row(new_row, new_class), true, 4);
}

/// Precomputed exclusion tables for extending an N1L parent by one row.
///
/// A new row B of class k fails iff some codeword u of the parent span has
/// 0 < wt(w_B + u) <= 4. With s = |u_body| + |{a_k, i} xor u_anchor|, the
/// weight is at most 4 iff |B & u_body| >= s / 2, possible only when s <= 7.
/// So u forbids single columns (s/2 == 1), column pairs (2) or whole
/// triples (3). The one exception is B == u_body with u_anchor == {a_k, i}:
/// then w_B is already a codeword, the code does not change, and B is
/// admissible whenever it is structurally valid. Such rows are kept in a
/// separate list per class.
class ExtensionFilter {
 public:
  ExtensionFilter() = default;

  /// Span-derived constraints. The parent must be N1L.
  static ExtensionFilter from_span(const Configuration& parent) {
    ExtensionFilter f;
    f.assign_span(parent);
    return f;
  }

  /// Only the partial-linear-space and class-disjointness constraints.
  static ExtensionFilter structural(const Configuration& parent) {
    ExtensionFilter f;
    f.assign_structural(parent);
    return f;
  }

  void assign_structural(const Configuration& parent) {
    reset(parent.num_cols());
    for (int i = 0; i < parent.num_rows(); ++i) {
      const Row row = parent.row(i);
      struct_single_[parent.class_of(i)] |= row;
      for_each_bit(row, [&](int j) { struct_pair_[j] |= row & ~bit(j); });
    }
    single_ = struct_single_;
    for (int k = 0; k < kClassCount; ++k)
      for (int j = 0; j < cols_; ++j) pair_[k][j] = struct_pair_[j];
  }

  void assign_span(const Configuration& parent) {
    assign_structural(parent);
    std::array<EmbeddedWord, kMaxGenerators> gens{};
    const int g = parent.num_rows() + 1;
    if (g > kMaxGenerators) throw Error(ErrorCode::TooLarge, "too many generators for exhaustive span");
    for (int i = 0; i < parent.num_rows(); ++i) gens[i] = embed_row(parent.row(i), parent.class_of(i));
    gens[g - 1] = kAnchorWord;
    EmbeddedWord acc;
    const std::uint64_t total = std::uint64_t{1} << g;
    for (std::uint64_t step = 1; step < total; ++step) {
      acc ^= gens[std::countr_zero(step)];
      const int wb = popcount(acc.body);
      if (wb > 7) continue;
      for (int k = 0; k < kClassCount; ++k) {
        const unsigned own = (1U << k) | EmbeddedWord::kShared;
        const int d = std::popcount(static_cast<unsigned>(acc.anchor ^ own));
        const int s = wb + d;
        if (s > 7) continue;
        const int t = s / 2;
        if (t > wb) continue;
        if (d == 0 && wb == 3) in_span_[k].push_back(acc.body);
        if (t <= 1) {
          single_[k] |= acc.body;
          if (t == 0) closed_[k] = true;
        } else if (t == 2) {
          for_each_bit(acc.body, [&](int j) { pair_[k][j] |= acc.body & ~bit(j); });
        } else {
          triple_[k].push_back(acc.body);
        }
      }
    }
    for (auto& list : in_span_) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
  }

  bool class_closed(int cls) const { return closed_[cls]; }
  Row forbidden_columns(int cls) const { return single_[cls]; }
  Row forbidden_partners(int cls, int j) const { return j < cols_ ? pair_[cls][j] : 0; }

  /// Columns that may not complete a triple with j1 and j2.
  Row forbidden_thirds(int cls, int j1, int j2) const {
    Row out = 0;
    const Row both = bit(j1) | bit(j2);
    for (Row u : triple_[cls])
      if ((u & both) == both) out |= u;
    return out;
  }

  /// Triple constraints involving column j, for hoisting out of inner loops.
  void triples_containing(int cls, int j, std::vector<Row>& out) const {
    out.clear();
    for (Row u : triple_[cls])
      if (u & bit(j)) out.push_back(u);
  }

  /// Rows of class cls whose embedded word is already in the parent span
  /// and which pass the structural checks. The main tables exclude them.
  template <class F>
  void for_each_in_span_row(int cls, F&& f) const {
    for (Row b : in_span_[cls])
      if (structurally_admits(b, cls)) f(b);
  }

  bool structurally_admits(Row body, int cls) const {
    if (body & struct_single_[cls]) return false;
    bool ok = true;
    for_each_bit(body, [&](int j) { ok = ok && !(j < cols_ && (struct_pair_[j] & body)); });
    return ok;
  }

  bool admits(Row body, int cls) const {
    if (std::find(in_span_[cls].begin(), in_span_[cls].end(), body) != in_span_[cls].end())
      return structurally_admits(body, cls);
    if (closed_[cls] || (body & single_[cls])) return false;
    bool ok = true;
    for_each_bit(body, [&](int j) { ok = ok && !(forbidden_partners(cls, j) & body); });
    if (!ok) return false;
    for (Row u : triple_[cls])
      if ((body & ~u) == 0) return false;
    return true;
  }

 private:
  void reset(int cols) {
    cols_ = cols;
    for (int k = 0; k < kClassCount; ++k) {
      single_[k] = 0;
      struct_single_[k] = 0;
      closed_[k] = false;
      triple_[k].clear();
      in_span_[k].clear();
    }
    for (int j = 0; j < cols; ++j) struct_pair_[j] = 0;
  }

  int cols_ = 0;
  std::array<Row, kClassCount> struct_single_{};
  std::array<Row, kMaxCols> struct_pair_{};
  std::array<Row, kClassCount> single_{};
  std::array<bool, kClassCount> closed_{};
  std::array<std::array<Row, kMaxCols>, kClassCount> pair_{};
  std::array<std::vector<Row>, kClassCount> triple_;
  std::array<std::vector<Row>, kClassCount> in_span_;
};

/// An exact nonnegative rational in lowest terms.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  friend bool operator==(const Rational&, const Rational&) = default;
  std::string to_string() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
  }
};

inline Rational make_rational(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
  std::uint64_t g = std::gcd(num, den);
  if (g == 0) g = 1;
  return {num / g, den / g};
}

/// (1 + n + C(n,2)) / 2^(n-k): the sphere-packing ratio of an [n,k] code.
inline Rational goodness_measure(int n, int k) {
  if (n < 0 || k < 0 || k > n) throw Error(ErrorCode::InvalidArgument, "require 0 <= k <= n");
  if (n - k > 63) throw Error(ErrorCode::TooLarge, "redundancy above 63");
  const std::uint64_t un = static_cast<std::uint64_t>(n);
  return make_rational(1 + un + un * (un - 1) / 2, std::uint64_t{1} << (n - k));
}

}  // namespace n1l

#endif  // N1L_GF2_CODE_HPP
