#ifndef N1L_CONFIG_HPP
#define N1L_CONFIG_HPP

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "n1l/bits.hpp"
#include "n1l/error.hpp"

namespace n1l {

inline constexpr int kClassCount = 4;
inline constexpr int kTypeCount = 15;

/// Column types in signature order. Type bit k is set iff the column meets
/// row class k.
inline constexpr std::array<std::uint8_t, kTypeCount> kTypeOrder = {
    0xF, 0x7, 0xB, 0xD, 0xE, 0x3, 0x5, 0x9, 0x6, 0xA, 0xC, 0x1, 0x2, 0x4, 0x8};

namespace detail {
constexpr std::array<int, 16> make_type_positions() {
  std::array<int, 16> pos{};
  pos[0] = -1;
  for (int p = 0; p < kTypeCount; ++p) pos[kTypeOrder[p]] = p;
  return pos;
}
}  // namespace detail

inline constexpr std::array<int, 16> kTypePosition = detail::make_type_positions();

/// Position of a nonzero 4-bit type in the signature order; -1 for type 0.
constexpr int type_position(unsigned type) { return kTypePosition[type & 0xF]; }

class ColumnType {
 public:
  constexpr explicit ColumnType(unsigned value) : value_(static_cast<std::uint8_t>(value)) {
    if (value == 0 || value > 0xF)
      throw Error(ErrorCode::InvalidArgument, "column type must be in 1..15");
  }
  constexpr unsigned value() const { return value_; }
  constexpr int weight() const { return std::popcount(static_cast<unsigned>(value_)); }
  constexpr int position() const { return type_position(value_); }
  constexpr bool meets(int cls) const { return (value_ >> cls) & 1U; }
  friend constexpr bool operator==(ColumnType, ColumnType) = default;

 private:
  std::uint8_t value_;
};

/// Sizes of the 4 row classes; class k occupies rows [begin(k), end(k)).
struct RowPartition {
  std::array<int, kClassCount> sizes{};

  constexpr int total() const { return sizes[0] + sizes[1] + sizes[2] + sizes[3]; }
  constexpr int begin(int cls) const {
    int b = 0;
    for (int k = 0; k < cls; ++k) b += sizes[k];
    return b;
  }
  constexpr int end(int cls) const { return begin(cls) + sizes[cls]; }
  constexpr int class_of(int row) const {
    for (int k = 0; k < kClassCount; ++k) {
      if (row < sizes[k]) return k;
      row -= sizes[k];
    }
    return -1;
  }
  friend constexpr bool operator==(const RowPartition&, const RowPartition&) = default;
};

/// 15 column-type counts indexed by signature position.
struct Signature {
  std::array<int, kTypeCount> counts{};

  int total() const { return std::accumulate(counts.begin(), counts.end(), 0); }
  int count_of(unsigned type) const { return counts[type_position(type)]; }
  friend auto operator<=>(const Signature&, const Signature&) = default;
};

/// An r x c incidence matrix with its rows partitioned into 4 ordered classes.
/// Rows are stored grouped by class, class 0 first.
class Configuration {
 public:
  Configuration() = default;

  Configuration(int cols, RowPartition partition, std::vector<Row> rows)
      : cols_(cols), partition_(partition), rows_(std::move(rows)) {
    if (cols < 0 || cols > kMaxCols)
      throw Error(ErrorCode::InvalidArgument, "column count out of range");
    for (int s : partition_.sizes)
      if (s < 0) throw Error(ErrorCode::InvalidArgument, "negative class size");
    if (partition_.total() != static_cast<int>(rows_.size()))
      throw Error(ErrorCode::PartitionMismatch, "class sizes do not sum to the row count");
    for (Row row : rows_)
      if ((row & ~low_mask(cols_)) != 0)
        throw Error(ErrorCode::ColumnRange, "row uses a column index >= cols");
  }

  /// Builds a configuration from (class, columns) rows in any order; rows are
  /// stably grouped by class.
  static Configuration from_rows(int cols, std::vector<std::pair<int, std::vector<int>>> rows) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    RowPartition partition;
    std::vector<Row> masks;
    masks.reserve(rows.size());
    for (const auto& [cls, columns] : rows) {
      if (cls < 0 || cls >= kClassCount)
        throw Error(ErrorCode::ClassRange, "class index must be in 0..3");
      Row mask = 0;
      for (int j : columns) {
        if (j < 0 || j >= cols) throw Error(ErrorCode::ColumnRange, "column index out of range");
        mask |= bit(j);
      }
      ++partition.sizes[cls];
      masks.push_back(mask);
    }
    return Configuration(cols, partition, std::move(masks));
  }

  int num_rows() const { return static_cast<int>(rows_.size()); }
  int num_cols() const { return cols_; }
  const RowPartition& partition() const { return partition_; }
  std::span<const Row> rows() const { return rows_; }
  Row row(int i) const { return rows_[i]; }
  int class_of(int i) const { return partition_.class_of(i); }
  std::span<const Row> class_rows(int cls) const {
    return std::span<const Row>(rows_).subspan(partition_.begin(cls), partition_.sizes[cls]);
  }

  /// Union of the rows in class cls.
  Row class_support(int cls) const {
    Row u = 0;
    for (Row r : class_rows(cls)) u |= r;
    return u;
  }

  /// Raw 4-bit type of column j (0 for an all-zero column).
  unsigned raw_type(int j) const {
    unsigned t = 0;
    for (int k = 0; k < kClassCount; ++k)
      if (class_support(k) & bit(j)) t |= 1U << k;
    return t;
  }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  int cols_ = 0;
  RowPartition partition_;
  std::vector<Row> rows_;
};

/// Raw type of every column, computed from the class supports in one pass.
inline std::vector<unsigned> raw_column_types(const Configuration& cfg) {
  std::vector<unsigned> types(cfg.num_cols(), 0);
  for (int k = 0; k < kClassCount; ++k)
    for_each_bit(cfg.class_support(k), [&](int j) { types[j] |= 1U << k; });
  return types;
}

inline ColumnType column_type_of(const Configuration& cfg, int j) {
  if (j < 0 || j >= cfg.num_cols()) throw Error(ErrorCode::InvalidArgument, "column index out of range");
  unsigned t = cfg.raw_type(j);
  if (t == 0) throw Error(ErrorCode::ZeroColumn, "column " + std::to_string(j) + " is all-zero");
  return ColumnType(t);
}

inline Signature compute_signature(const Configuration& cfg) {
  Signature sig;
  auto types = raw_column_types(cfg);
  for (int j = 0; j < cfg.num_cols(); ++j) {
    if (types[j] == 0) throw Error(ErrorCode::ZeroColumn, "column " + std::to_string(j) + " is all-zero");
    ++sig.counts[type_position(types[j])];
  }
  return sig;
}

/// Applies a column permutation: column j of the input becomes column
/// new_index[j] of the output.
inline Configuration permute_columns(const Configuration& cfg, std::span<const int> new_index) {
  std::vector<Row> rows;
  rows.reserve(cfg.num_rows());
  for (Row row : cfg.rows()) {
    Row out = 0;
    for_each_bit(row, [&](int j) { out |= bit(new_index[j]); });
    rows.push_back(out);
  }
  return Configuration(cfg.num_cols(), cfg.partition(), std::move(rows));
}

/// Stably reorders columns into signature type order. Zero columns, if any,
/// are placed last.
inline Configuration normalize_layout(const Configuration& cfg) {
  auto types = raw_column_types(cfg);
  std::vector<int> order(cfg.num_cols());
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](int j) { return types[j] == 0 ? kTypeCount : type_position(types[j]); };
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key(a) < key(b); });
  std::vector<int> new_index(cfg.num_cols());
  for (int p = 0; p < cfg.num_cols(); ++p) new_index[order[p]] = p;
  return permute_columns(cfg, new_index);
}

/// m diagonal copies of each row class. Copy t of class k sits at row offset
/// begin(k)*m + t*s_k and column offset t*c.
inline Configuration replicate(const Configuration& cfg, int m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "replication factor must be >= 1");
  const int c = cfg.num_cols();
  if (static_cast<long>(m) * c > kMaxCols)
    throw Error(ErrorCode::TooLarge, "replicated configuration exceeds 64 columns");
  RowPartition partition;
  std::vector<Row> rows;
  for (int k = 0; k < kClassCount; ++k) {
    partition.sizes[k] = cfg.partition().sizes[k] * m;
    for (int t = 0; t < m; ++t)
      for (Row row : cfg.class_rows(k)) rows.push_back(row << (t * c));
  }
  return Configuration(c * m, partition, std::move(rows));
}

// ---------------------------------------------------------------------------
// Text format

inline std::string serialize_text(const Configuration& cfg) {
  std::ostringstream out;
  const auto& s = cfg.partition().sizes;
  out << "N1L v1\n";
  out << "rows=" << cfg.num_rows() << " cols=" << cfg.num_cols() << "\n";
  out << "parts=" << s[0] << ',' << s[1] << ',' << s[2] << ',' << s[3] << "\n";
  for (int i = 0; i < cfg.num_rows(); ++i) {
    out << "row " << cfg.class_of(i) << " :";
    for_each_bit(cfg.row(i), [&](int j) { out << ' ' << j; });
    out << "\n";
  }
  return out.str();
}

namespace detail {

inline bool parse_int(std::string_view s, int& out) {
  if (s.empty() || s.size() > 9) return false;
  int v = 0;
  for (char ch : s) {
    if (ch < '0' || ch > '9') return false;
    v = v * 10 + (ch - '0');
  }
  out = v;
  return true;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) parts.push_back(line.substr(i, j - i));
    i = j;
  }
  return parts;
}

}  // namespace detail

inline Configuration parse_text(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start <= text.size();) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = nl + 1;
  }
  while (!lines.empty() && detail::split_ws(lines.back()).empty()) lines.pop_back();

  auto header_error = [](int line, const std::string& msg) {
    return Error(ErrorCode::MalformedHeader, "line " + std::to_string(line) + ": " + msg, line);
  };
  if (lines.size() < 3) throw header_error(static_cast<int>(lines.size()) + 1, "missing header lines");
  if (detail::split_ws(lines[0]) != std::vector<std::string_view>{"N1L", "v1"})
    throw header_error(1, "expected 'N1L v1'");

  int r = 0, c = 0;
  {
    auto f = detail::split_ws(lines[1]);
    if (f.size() != 2 || !f[0].starts_with("rows=") || !f[1].starts_with("cols=") ||
        !detail::parse_int(f[0].substr(5), r) || !detail::parse_int(f[1].substr(5), c))
      throw header_error(2, "expected 'rows=<r> cols=<c>'");
    if (c > kMaxCols) throw header_error(2, "at most 64 columns are supported");
  }
  RowPartition partition;
  {
    std::string_view l = lines[2];
    if (!l.starts_with("parts=")) throw header_error(3, "expected 'parts=<s0>,<s1>,<s2>,<s3>'");
    l.remove_prefix(6);
    for (int k = 0; k < kClassCount; ++k) {
      std::size_t comma = l.find(',');
      std::string_view field = k < 3 ? l.substr(0, comma) : l;
      if ((k < 3 && comma == std::string_view::npos) || !detail::parse_int(field, partition.sizes[k]))
        throw header_error(3, "expected 'parts=<s0>,<s1>,<s2>,<s3>'");
      if (k < 3) l.remove_prefix(comma + 1);
    }
    if (partition.total() != r)
      throw Error(ErrorCode::PartitionMismatch, "line 3: parts do not sum to rows", 3);
  }
  if (static_cast<int>(lines.size()) - 3 != r)
    throw Error(ErrorCode::PartitionMismatch,
                "expected " + std::to_string(r) + " row lines, found " + std::to_string(lines.size() - 3),
                static_cast<int>(lines.size()));

  std::vector<Row> rows;
  rows.reserve(r);
  for (int i = 0; i < r; ++i) {
    const int ln = i + 4;
    auto f = detail::split_ws(lines[3 + i]);
    auto row_error = [&](ErrorCode code, const std::string& msg) {
      return Error(code, "line " + std::to_string(ln) + ": " + msg, ln);
    };
    int cls = 0;
    if (f.size() < 3 || f[0] != "row" || f[2] != ":" || !detail::parse_int(f[1], cls))
      throw row_error(ErrorCode::MalformedRow, "expected 'row <class> : <j1> <j2> <j3>'");
    if (cls > 3) throw row_error(ErrorCode::ClassRange, "class index must be in 0..3");
    if (cls != partition.class_of(i))
      throw row_error(ErrorCode::PartitionMismatch, "row class does not match parts");
    if (f.size() != 6) throw row_error(ErrorCode::RowWeight, "row must list exactly 3 columns");
    Row mask = 0;
    int prev = -1;
    for (std::size_t t = 3; t < f.size(); ++t) {
      int j = 0;
      if (!detail::parse_int(f[t], j)) throw row_error(ErrorCode::MalformedRow, "bad column index");
      if (j >= c) throw row_error(ErrorCode::ColumnRange, "column index >= cols");
      if (j <= prev) throw row_error(ErrorCode::MalformedRow, "column indices must ascend");
      prev = j;
      mask |= bit(j);
    }
    rows.push_back(mask);
  }
  return Configuration(c, partition, std::move(rows));
}

// ---------------------------------------------------------------------------
// CanonicalKey byte format: r, c, s0..s3 (one byte each), then r rows of
// ceil(c/8) bytes, column j in byte j/8 at bit j%8.

inline constexpr std::size_t kKeyHeaderBytes = 6;

constexpr std::size_t key_row_bytes(int cols) { return static_cast<std::size_t>((cols + 7) / 8); }

inline void append_key_header(std::string& out, int rows, int cols, const RowPartition& p) {
  out.push_back(static_cast<char>(rows));
  out.push_back(static_cast<char>(cols));
  for (int s : p.sizes) out.push_back(static_cast<char>(s));
}

inline void append_key_row(std::string& out, Row row, int cols) {
  for (std::size_t b = 0; b < key_row_bytes(cols); ++b)
    out.push_back(static_cast<char>((row >> (8 * b)) & 0xFF));
}

inline std::string encode_key(const Configuration& cfg) {
  std::string key;
  key.reserve(kKeyHeaderBytes + cfg.num_rows() * key_row_bytes(cfg.num_cols()));
  append_key_header(key, cfg.num_rows(), cfg.num_cols(), cfg.partition());
  for (Row row : cfg.rows()) append_key_row(key, row, cfg.num_cols());
  return key;
}

/// Column count stored in a key without decoding it.
inline int key_cols(std::string_view key) { return static_cast<unsigned char>(key[1]); }
inline int key_rows(std::string_view key) { return static_cast<unsigned char>(key[0]); }

inline Configuration decode_key(std::string_view key) {
  if (key.size() < kKeyHeaderBytes) throw Error(ErrorCode::InvalidArgument, "truncated key");
  auto byte = [&](std::size_t i) { return static_cast<unsigned char>(key[i]); };
  const int r = byte(0), c = byte(1);
  RowPartition p{{byte(2), byte(3), byte(4), byte(5)}};
  const std::size_t rb = key_row_bytes(c);
  if (key.size() != kKeyHeaderBytes + r * rb) throw Error(ErrorCode::InvalidArgument, "key length mismatch");
  std::vector<Row> rows(r, 0);
  for (int i = 0; i < r; ++i)
    for (std::size_t b = 0; b < rb; ++b)
      rows[i] |= static_cast<Row>(byte(kKeyHeaderBytes + i * rb + b)) << (8 * b);
  return Configuration(c, p, std::move(rows));
}

inline std::string to_hex(std::string_view bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (char ch : bytes) {
    auto b = static_cast<unsigned char>(ch);
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

/// 64-bit FNV-1a, used as a short printable digest of a key.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char ch : bytes) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace n1l

#endif  // N1L_CONFIG_HPP
