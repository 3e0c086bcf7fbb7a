#ifndef N1L_SEARCH_HPP
#define N1L_SEARCH_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <climits>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "n1l/canon.hpp"
#include "n1l/config.hpp"
#include "n1l/gf2_code.hpp"
#include "n1l/store.hpp"

namespace n1l {

enum class SearchMode { Full, Bounded };

struct SearchLimits {
  int max_rows = 14;
  int max_cols = 18;
  bool n1l_filter = true;
  SearchMode mode = SearchMode::Full;
  int max_new_cols_per_step = 2;  // bounded mode only
  int keep_cmin_count = 2;        // bounded mode only

  /// Fresh columns a single new row may open.
  int fresh_column_cap() const { return mode == SearchMode::Bounded ? std::min(3, max_new_cols_per_step) : 3; }

  void validate() const {
    if (max_rows < 1) throw Error(ErrorCode::InvalidArgument, "max rows must be >= 1");
    if (max_cols < 3 || max_cols > kMaxCols) throw Error(ErrorCode::InvalidArgument, "max cols must be in 3..64");
    if (max_rows >= Canonicalizer::kMaxRows || max_rows + 1 > kMaxGenerators)
      throw Error(ErrorCode::InvalidArgument, "max rows too large");
    if (mode == SearchMode::Bounded && (max_new_cols_per_step < 0 || keep_cmin_count < 1))
      throw Error(ErrorCode::InvalidArgument, "bad bounded-mode parameters");
  }
};

struct SearchOptions {
  int threads = 1;
  std::size_t memory_limit_bytes = std::size_t{4} << 30;
  bool grouped_signature = false;
  /// Called after each completed stage with its archive.
  std::function<void(int rows, const KeyArchive&)> on_archive;
  /// Progress lines; nullptr silences them.
  std::ostream* log = nullptr;
};

/// Number of isomorphism classes with exactly r rows and c columns.
class CountsTable {
 public:
  CountsTable() = default;
  CountsTable(int max_rows, int max_cols)
      : max_rows_(max_rows), max_cols_(max_cols), counts_((max_rows + 1) * (max_cols + 1), 0) {}

  int max_rows() const { return max_rows_; }
  int max_cols() const { return max_cols_; }
  std::uint64_t at(int r, int c) const {
    if (r < 0 || r > max_rows_ || c < 0 || c > max_cols_) return 0;
    return counts_[r * (max_cols_ + 1) + c];
  }
  void set(int r, int c, std::uint64_t v) { counts_[r * (max_cols_ + 1) + c] = v; }

  /// Tab-separated grid with header r, c5..c<max>, one line per r >= 2.
  std::string to_tsv(int first_row = 2, int first_col = 5) const {
    std::ostringstream out;
    out << "r";
    for (int c = first_col; c <= max_cols_; ++c) out << "\tc" << c;
    out << "\n";
    for (int r = first_row; r <= max_rows_; ++r) {
      out << r;
      for (int c = first_col; c <= max_cols_; ++c) out << '\t' << at(r, c);
      out << "\n";
    }
    return out.str();
  }

  friend bool operator==(const CountsTable&, const CountsTable&) = default;

 private:
  int max_rows_ = 0;
  int max_cols_ = 0;
  std::vector<std::uint64_t> counts_;
};

/// Largest row count an N1' configuration on c columns can have.
constexpr int max_rows_for_cols(int c) { return 4 * (c / 3); }

/// Every (row, class) that extends parent by one weight-3 row. Rows use
/// existing columns and up to fresh_cap new columns c, c+1, ... (always the
/// lowest unused ones), never exceeding max_cols; triples are generated in
/// ascending column order. The filter prunes with its single, pair and
/// triple exclusions, so with a span filter only N1L extensions are emitted;
/// rows already in the parent span are emitted separately.
/// emit(row, cls, new_cols) is called for each.
template <class Emit>
void for_each_extension(const Configuration& parent, const ExtensionFilter& filter, int max_cols, int fresh_cap,
                        std::vector<Row>& scratch, Emit&& emit) {
  const int c = parent.num_cols();
  const int fresh = std::max(0, std::min(fresh_cap, max_cols - c));
  const int universe = c + fresh;
  for (int cls = 0; cls < kClassCount; ++cls) {
    if (filter.class_closed(cls)) continue;
    const Row allowed = low_mask(universe) & ~filter.forbidden_columns(cls);
    for (Row r1 = allowed; r1 != 0; r1 &= r1 - 1) {
      const int j1 = std::countr_zero(r1);
      if (j1 > c) break;
      const Row a2 = allowed & ~filter.forbidden_partners(cls, j1) & ~low_mask(j1 + 1);
      filter.triples_containing(cls, j1, scratch);
      for (Row r2 = a2; r2 != 0; r2 &= r2 - 1) {
        const int j2 = std::countr_zero(r2);
        if (j2 > (j1 >= c ? j1 + 1 : c)) break;
        Row a3 = a2 & ~filter.forbidden_partners(cls, j2) & ~low_mask(j2 + 1);
        for (Row u : scratch)
          if (u & bit(j2)) a3 &= ~u;
        for (Row r3 = a3; r3 != 0; r3 &= r3 - 1) {
          const int j3 = std::countr_zero(r3);
          if (j3 > (j2 >= c ? j2 + 1 : c)) break;
          emit(bit(j1) | bit(j2) | bit(j3), cls, std::max(c, j3 + 1));
        }
      }
    }
    filter.for_each_in_span_row(cls, [&](Row row) { emit(row, cls, c); });
  }
}

/// The parent with row added at the end of class cls.
inline Configuration extend(const Configuration& parent, Row row, int cls, int new_cols) {
  std::vector<Row> rows(parent.rows().begin(), parent.rows().end());
  rows.insert(rows.begin() + parent.partition().end(cls), row);
  RowPartition p = parent.partition();
  ++p.sizes[cls];
  return Configuration(new_cols, p, std::move(rows));
}

/// All structurally valid one-row extensions of parent (no N1L filtering).
inline std::vector<Configuration> enumerate_extensions(const Configuration& parent, const SearchLimits& limits) {
  std::vector<Configuration> out;
  std::vector<Row> scratch;
  const auto filter = ExtensionFilter::structural(parent);
  for_each_extension(parent, filter, limits.max_cols, limits.fresh_column_cap(), scratch,
                     [&](Row row, int cls, int cols) { out.push_back(extend(parent, row, cls, cols)); });
  return out;
}

/// The unique one-row configuration.
inline Configuration seed_configuration() { return Configuration::from_rows(3, {{0, {0, 1, 2}}}); }

struct StageReport {
  int rows = 0;
  std::size_t parents = 0;
  std::uint64_t extensions = 0;  // candidates canonicalized
  std::size_t classes = 0;       // after dedupe (and retention, in bounded mode)
  std::vector<std::uint64_t> per_cols;
  double seconds = 0;
};

namespace detail {

/// Expands every parent by one row into store. admit_cols, when set, is
/// consulted before canonicalizing and told about each new class.
class StageRunner {
 public:
  StageRunner(const SearchLimits& limits, const SearchOptions& options) : limits_(limits), options_(options) {}

  std::uint64_t run(const KeyArchive& parents, StageStore& store,
                    std::function<bool(int cols)> admit = {}, std::function<void(int cols)> admitted = {}) {
    std::atomic<std::size_t> next{0};
    std::atomic<std::uint64_t> extensions{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    std::atomic<bool> stop{false};
    const std::size_t chunk = 64;

    auto worker = [&] {
      try {
        Canonicalizer canon(options_.grouped_signature);
        ExtensionFilter filter;
        std::vector<Row> scratch;
        std::string key;
        std::array<Row, Canonicalizer::kMaxRows> rows{};
        std::uint64_t local = 0;
        while (!stop) {
          const std::size_t begin = next.fetch_add(chunk);
          if (begin >= parents.size()) break;
          const std::size_t end = std::min(parents.size(), begin + chunk);
          for (std::size_t p = begin; p < end && !stop; ++p) {
            const Configuration parent = decode_key(parents[p]);
            if (limits_.n1l_filter) filter.assign_span(parent);
            else filter.assign_structural(parent);
            const int r = parent.num_rows();
            for_each_extension(parent, filter, limits_.max_cols, limits_.fresh_column_cap(), scratch,
                               [&](Row row, int cls, int cols) {
                                 if (admit && !admit(cols)) return;
                                 const int at = parent.partition().end(cls);
                                 std::copy(parent.rows().begin(), parent.rows().begin() + at, rows.begin());
                                 rows[at] = row;
                                 std::copy(parent.rows().begin() + at, parent.rows().end(), rows.begin() + at + 1);
                                 RowPartition part = parent.partition();
                                 ++part.sizes[cls];
                                 canon.canonical_key(std::span<const Row>(rows.data(), r + 1), part, cols, key);
                                 ++local;
                                 if (store.insert(key) && admitted) admitted(cols);
                               });
          }
        }
        extensions += local;
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
    };

    const int threads = std::max(1, options_.threads);
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return extensions.load();
  }

 private:
  const SearchLimits& limits_;
  const SearchOptions& options_;
};

inline void log_stage(const SearchOptions& options, const StageReport& rep) {
  if (!options.log) return;
  std::ostringstream line;
  line << "stage r=" << rep.rows << " parents=" << rep.parents << " extensions=" << rep.extensions
       << " classes=" << rep.classes << " time=" << rep.seconds << "s";
  *options.log << line.str() << std::endl;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Archive holding the canonical seed.
inline KeyArchive seed_archive(int max_cols) {
  KeyArchive a(1, max_cols);
  a.append(canonical_form(seed_configuration()).key);
  return a;
}

/// One stage: canonical one-row extensions of every parent, deduplicated.
inline KeyArchive run_stage(const KeyArchive& previous, const SearchLimits& limits, const SearchOptions& options,
                            StageReport* report = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  StageStore store(options.memory_limit_bytes);
  detail::StageRunner runner(limits, options);
  const std::uint64_t ext = runner.run(previous, store);
  KeyArchive next = store.pack(previous.rows() + 1, limits.max_cols);
  if (report) {
    report->rows = previous.rows() + 1;
    report->parents = previous.size();
    report->extensions = ext;
    report->classes = next.size();
    const auto per = store.counts_by_cols();
    report->per_cols.assign(per.begin(), per.end());
    report->seconds = detail::seconds_since(t0);
  }
  return next;
}

struct SearchResult {
  CountsTable table;
  std::vector<StageReport> stages;
  bool overflow = false;
  std::string message;
};

/// Staged exhaustive search from the one-row seed up to the limits. On
/// StageOverflow the table holds every completed stage and overflow is set.
inline SearchResult run_search(const SearchLimits& limits, const SearchOptions& options = {}) {
  limits.validate();
  SearchResult result;
  result.table = CountsTable(limits.max_rows, limits.max_cols);
  KeyArchive current = seed_archive(limits.max_cols);
  result.table.set(1, 3, 1);
  if (options.on_archive) options.on_archive(1, current);
  for (int r = 2; r <= limits.max_rows; ++r) {
    StageReport rep;
    try {
      current = run_stage(current, limits, options, &rep);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::StageOverflow) throw;
      result.overflow = true;
      result.message = e.what();
      break;
    }
    for (int c = 0; c <= limits.max_cols; ++c) result.table.set(r, c, rep.per_cols[c]);
    detail::log_stage(options, rep);
    result.stages.push_back(rep);
    if (options.on_archive) options.on_archive(r, current);
    if (current.empty()) break;
  }
  return result;
}

struct BoundedResult {
  std::map<int, int> bounds;  // r -> smallest c found
  std::vector<StageReport> stages;
  bool aborted = false;
  std::string message;
};

/// Bounded extension search from a seed archive: each stage opens at most
/// max_new_cols_per_step columns per new row, and only the classes at the
/// keep_cmin_count smallest column counts survive as parents.
inline BoundedResult run_bounded_search(const SearchLimits& limits, const KeyArchive& seed,
                                        const SearchOptions& options = {}) {
  limits.validate();
  BoundedResult result;
  KeyArchive current = seed;
  const int k = limits.keep_cmin_count;
  for (int r = seed.rows() + 1; r <= limits.max_rows && !current.empty(); ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    // Smallest distinct column counts admitted so far; a candidate with more
    // columns than the k-th of them can never be retained.
    std::mutex mu;
    std::vector<int> seen;
    std::atomic<int> threshold{INT_MAX};
    auto admit = [&](int cols) { return cols <= threshold.load(std::memory_order_relaxed); };
    auto admitted = [&](int cols) {
      std::lock_guard lock(mu);
      if (std::find(seen.begin(), seen.end(), cols) != seen.end()) return;
      seen.push_back(cols);
      std::sort(seen.begin(), seen.end());
      if (static_cast<int>(seen.size()) >= k) threshold = seen[k - 1];
    };
    StageStore store(options.memory_limit_bytes);
    detail::StageRunner runner(limits, options);
    StageReport rep;
    try {
      rep.extensions = runner.run(current, store, admit, admitted);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::StageOverflow) throw;
      result.aborted = true;
      result.message = "r=" + std::to_string(r) + ": " + e.what();
      break;
    }
    std::sort(seen.begin(), seen.end());
    if (static_cast<int>(seen.size()) > k) seen.resize(k);
    const KeyArchive next = store.pack(r, limits.max_cols, [&](int cols) {
      return std::find(seen.begin(), seen.end(), cols) != seen.end();
    });
    rep.rows = r;
    rep.parents = current.size();
    rep.classes = next.size();
    const auto per = store.counts_by_cols();
    rep.per_cols.assign(per.begin(), per.end());
    rep.seconds = detail::seconds_since(t0);
    detail::log_stage(options, rep);
    result.stages.push_back(rep);
    if (next.empty()) break;
    result.bounds[r] = seen.front();
    if (options.on_archive) options.on_archive(r, next);
    store.clear();
    current = next;
  }
  return result;
}

struct RatioRow {
  int rows = 0;
  int cmin = 0;
  Rational ratio;
};

/// For each r with any class: the least column count and r / cmin.
inline std::vector<RatioRow> report_ratio(const CountsTable& table) {
  std::vector<RatioRow> out;
  for (int r = 1; r <= table.max_rows(); ++r)
    for (int c = 0; c <= table.max_cols(); ++c)
      if (table.at(r, c) != 0) {
        out.push_back({r, c, make_rational(static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(c))});
        break;
      }
  return out;
}

}  // namespace n1l

#endif  // N1L_SEARCH_HPP
