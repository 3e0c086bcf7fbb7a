// Acceptance checks: one PASS/FAIL line per criterion.
//
//   acceptance [--tier fast|extended|all] [--threads N] [--archive-dir DIR]

#include <algorithm>
#include <array>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "fixtures.hpp"
#include "n1l/canon.hpp"
#include "n1l/gf2_code.hpp"
#include "n1l/search.hpp"
#include "n1l/signature_canon.hpp"
#include "n1l/validity.hpp"

using namespace n1l;

namespace {

// Isomorphism class counts for r = 2..14 over c = 5..18.
constexpr int kFirstRow = 2, kFirstCol = 5, kLastRow = 14, kLastCol = 18;
constexpr std::uint64_t kTable[kLastRow - kFirstRow + 1][kLastCol - kFirstCol + 1] = {
    {1, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 3, 2, 3, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 2, 10, 11, 5, 5, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 12, 42, 38, 24, 8, 6, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 23, 153, 257, 213, 108, 48, 14, 9},
    {0, 0, 0, 0, 0, 0, 0, 30, 583, 1635, 1927, 1262, 607, 223},
    {0, 0, 0, 0, 0, 0, 0, 5, 13, 2442, 11813, 18982, 16261, 9187},
    {0, 0, 0, 0, 0, 0, 0, 0, 1, 30, 9153, 87725, 200690, 219285},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 170, 26957, 652926, 2220665},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 840, 48624, 4677339},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 6, 2513, 85836},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 24, 3372},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 100},
};

const std::map<int, int> kBounds{{15, 19}, {16, 19}, {17, 21}, {18, 22}, {19, 22}};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void fail(const std::string& why) {
    if (pass) detail << why;
    pass = false;
  }
};

int failures = 0;

void report(const std::string& name, Outcome& o, double seconds) {
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS " : "FAIL ") << name << " (" << std::fixed;
  std::cout.precision(1);
  std::cout << seconds << "s)";
  if (!o.detail.str().empty()) std::cout << ": " << o.detail.str();
  std::cout << std::endl;
}

template <class F>
void run_check(const std::string& name, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    body(o);
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  report(name, o, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

void compare_grid(const CountsTable& table, int max_rows, int max_cols, Outcome& o) {
  int cells = 0;
  for (int r = kFirstRow; r <= max_rows; ++r)
    for (int c = kFirstCol; c <= max_cols; ++c) {
      const auto want = kTable[r - kFirstRow][c - kFirstCol];
      if (table.at(r, c) != want)
        o.fail("r=" + std::to_string(r) + " c=" + std::to_string(c) + " got " + std::to_string(table.at(r, c)) +
               " want " + std::to_string(want));
      ++cells;
    }
  if (table.at(1, 3) != 1) o.fail("r=1 c=3 must be 1");
  if (o.pass) o.detail << cells << " cells match";
}

SearchLimits limits_of(int rows, int cols) {
  SearchLimits l;
  l.max_rows = rows;
  l.max_cols = cols;
  return l;
}

std::vector<KeyArchive> archives_of(int rows, int cols, int threads) {
  std::vector<KeyArchive> out;
  SearchOptions options;
  options.threads = threads;
  options.on_archive = [&](int, const KeyArchive& a) { out.push_back(a); };
  run_search(limits_of(rows, cols), options);
  return out;
}

// ---------------------------------------------------------------------------

using Graph = std::array<std::uint8_t, 8>;  // adjacency bitmasks

Graph graph_of(const Configuration& cfg) {
  Graph g{};
  for (int j = 0; j < cfg.num_cols(); ++j) {
    int ends[2], n = 0;
    for (int i = 0; i < 8; ++i)
      if (cfg.row(i) & bit(j)) ends[n++] = i;
    g[ends[0]] |= 1U << ends[1];
    g[ends[1]] |= 1U << ends[0];
  }
  return g;
}

bool isomorphic(const Graph& a, const Graph& b) {
  std::array<int, 8> p{0, 1, 2, 3, 4, 5, 6, 7};
  do {
    bool ok = true;
    for (int u = 0; u < 8 && ok; ++u)
      for (int v = 0; v < 8 && ok; ++v) ok = ((a[u] >> v & 1) == (b[p[u]] >> p[v] & 1));
    if (ok) return true;
  } while (std::next_permutation(p.begin(), p.end()));
  return false;
}

bool triangle_free(const Graph& g) {
  for (int u = 0; u < 8; ++u)
    for (int v = u + 1; v < 8; ++v)
      if ((g[u] >> v & 1) && (g[u] & g[v])) return false;
  return true;
}

void check_cubic_graphs(Outcome& o) {
  const auto archives = archives_of(8, 12, 1);
  const auto& stage = archives.at(7);
  Graph cube{};
  for (int v = 0; v < 8; ++v)
    for (int b = 0; b < 3; ++b) cube[v] |= 1U << (v ^ (1 << b));
  // Cycle 0..7 plus long diagonals: triangle-free, not bipartite.
  Graph wagner{};
  for (int v = 0; v < 8; ++v) wagner[v] = (1U << ((v + 1) % 8)) | (1U << ((v + 7) % 8)) | (1U << ((v + 4) % 8));
  if (isomorphic(cube, wagner)) o.fail("reference graphs coincide");

  int n = 0, cubes = 0, others = 0;
  for (std::size_t i = 0; i < stage.size(); ++i) {
    if (key_cols(stage[i]) != 12) continue;
    ++n;
    const auto cfg = decode_key(stage[i]);
    for (int j = 0; j < 12; ++j) {
      int w = 0;
      for (Row r : cfg.rows()) w += (r >> j) & 1;
      if (w != 2) o.fail("column of weight != 2");
    }
    if (cfg.partition().sizes != std::array<int, 4>{2, 2, 2, 2}) o.fail("partition not 2,2,2,2");
    const auto g = graph_of(cfg);
    for (int v = 0; v < 8; ++v)
      if (std::popcount(static_cast<unsigned>(g[v])) != 3) o.fail("graph not cubic");
    if (!triangle_free(g)) o.fail("graph has a triangle");
    if (isomorphic(g, cube)) ++cubes;
    else if (isomorphic(g, wagner)) ++others;
  }
  o.detail << n << " classes, " << cubes << " cube, " << others << " other";
  if (n != 5 || cubes != 3 || others != 2) o.fail("");
}

// ---------------------------------------------------------------------------

// Counts per (r, c) from every labeled N1L configuration with r <= 3 rows and
// c <= 9 columns, bucketed by the exhaustive canonical form.
std::map<std::pair<int, int>, std::size_t> brute_force_counts() {
  std::map<std::pair<int, int>, std::set<std::string>> buckets;
  for (int c = 3; c <= 9; ++c) {
    std::vector<std::pair<int, Row>> labeled;
    for (int cls = 0; cls < 4; ++cls)
      for (int a = 0; a < c; ++a)
        for (int b = a + 1; b < c; ++b)
          for (int d = b + 1; d < c; ++d) labeled.push_back({cls, bit(a) | bit(b) | bit(d)});
    const std::size_t n = labeled.size();
    auto consider = [&](const std::vector<std::size_t>& pick) {
      Row cover = 0;
      for (auto i : pick) cover |= labeled[i].second;
      if (cover != low_mask(c)) return;
      std::vector<std::pair<int, std::vector<int>>> rows;
      for (auto i : pick) {
        std::vector<int> js;
        for_each_bit(labeled[i].second, [&](int j) { js.push_back(j); });
        rows.push_back({labeled[i].first, js});
      }
      const auto cfg = Configuration::from_rows(c, rows);
      if (!is_valid_n1_prime(cfg) || !is_n1l(cfg)) return;
      buckets[{cfg.num_rows(), c}].insert(encode_key(brute_force_canonical(cfg)));
    };
    for (std::size_t i = 0; i < n; ++i) {
      consider({i});
      for (std::size_t j = i + 1; j < n; ++j) {
        if (popcount(labeled[i].second & labeled[j].second) > 1) continue;
        consider({i, j});
        for (std::size_t k = j + 1; k < n; ++k) {
          if (popcount((labeled[i].second | labeled[j].second | labeled[k].second)) < c) continue;
          consider({i, j, k});
        }
      }
    }
  }
  std::map<std::pair<int, int>, std::size_t> out;
  for (const auto& [rc, keys] : buckets) out[rc] = keys.size();
  return out;
}

void check_oracles(Outcome& o) {
  // (a) from-scratch generator
  const auto table = run_search(limits_of(3, 9)).table;
  const auto brute = brute_force_counts();
  int cells = 0;
  for (int r = 1; r <= 3; ++r)
    for (int c = 3; c <= 9; ++c) {
      const auto it = brute.find({r, c});
      const std::size_t want = it == brute.end() ? 0 : it->second;
      if (table.at(r, c) != want)
        o.fail("(a) r=" + std::to_string(r) + " c=" + std::to_string(c) + " search " +
               std::to_string(table.at(r, c)) + " brute " + std::to_string(want));
      ++cells;
    }

  // (b) canonical form vs exhaustive reference
  int compared = 0;
  for (const auto& a : archives_of(4, 8, 1))
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto cfg = decode_key(a[i]);
      if (brute_force_canonical(cfg) != canonical_form(cfg).config) o.fail("(b) stored class mismatch");
      ++compared;
    }
  std::mt19937_64 rng(1);
  for (int done = 0; done < 1000;) {
    const auto cfg = fixtures::random_valid(1 + static_cast<int>(rng() % 5), 9, rng);
    const auto iso = fixtures::random_isomorph(cfg, rng);
    if (brute_force_canonical(iso) != canonical_form(cfg).config) o.fail("(b) random mismatch");
    ++done;
  }

  // (c) incremental vs full N1L check
  std::uint64_t extensions = 0;
  const auto limits = limits_of(5, 10);
  for (const auto& a : archives_of(4, 10, 1))
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto parent = decode_key(a[i]);
      for (const auto& child : enumerate_extensions(parent, limits)) {
        int added = 0;
        for (int k = 0; k < kClassCount; ++k)
          if (child.partition().sizes[k] != parent.partition().sizes[k]) added = k;
        if (is_n1l_incremental(parent, child.row(child.partition().end(added) - 1), added) != is_n1l(child))
          o.fail("(c) disagreement");
        ++extensions;
      }
    }
  o.detail << "(a) " << cells << " cells, (b) " << compared << " classes + 1000 random, (c) " << extensions
           << " extensions";
}

// ---------------------------------------------------------------------------

void check_properties(Outcome& o, int threads) {
  std::map<int, int> census = subgroup_order_census();
  const std::map<int, int> want{{1, 1}, {2, 9}, {3, 4}, {4, 7}, {6, 4}, {8, 3}, {12, 1}, {24, 1}};
  if (s4_subgroups().size() != 30 || s4_coset_count() != 234 || census != want) o.fail("S4 census");

  std::mt19937_64 rng(10000);
  for (int t = 0; t < 10000; ++t) {
    Signature s;
    for (auto& x : s.counts) x = static_cast<int>(rng() % 6);
    const auto a = canonicalize_signature(s), b = canonicalize_signature_grouped(s);
    if (a.canonical != b.canonical || a.achievers != b.achievers) o.fail("grouped signature mismatch");
  }

  const auto small = archives_of(4, 12, 1);
  for (const auto& a : small)
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto cfg = decode_key(a[i]);
      for (int t = 0; t < 100; ++t)
        if (canonical_form(fixtures::random_isomorph(cfg, rng)).key != a[i]) o.fail("key not invariant");
      const auto s = compute_signature(cfg);
      for (int m = 1; m <= 3; ++m) {
        const auto rep = replicate(cfg, m);
        const auto sm = compute_signature(rep);
        for (int p = 0; p < kTypeCount; ++p)
          if (sm.counts[p] != m * s.counts[p]) o.fail("replicated signature not scaled");
        if (!is_valid_n1_prime(rep) || !is_n1l(rep)) o.fail("replication lost N1L");
      }
    }

  const auto one = archives_of(9, 14, 1);
  const auto many = archives_of(9, 14, threads);
  if (one.size() != many.size()) o.fail("thread runs differ in stage count");
  for (std::size_t i = 0; i < one.size() && i < many.size(); ++i)
    if (!(one[i] == many[i])) o.fail("thread runs differ at r=" + std::to_string(one[i].rows()));
  std::size_t stored = 0;
  for (const auto& a : one)
    for (std::size_t i = 0; i < a.size(); ++i, ++stored)
      if (key_rows(a[i]) > max_rows_for_cols(key_cols(a[i]))) o.fail("structural-zero bound violated");
  o.detail << "census, 10000 signatures, " << stored << " classes checked, threads 1 vs " << threads;
}

// ---------------------------------------------------------------------------

void check_bounded(Outcome& o, const KeyArchive& r13, int threads) {
  const auto seed = r13.filtered([](int c) { return c == 17 || c == 18; });
  SearchLimits l = limits_of(19, kMaxCols);
  l.mode = SearchMode::Bounded;
  SearchOptions options;
  options.threads = threads;
  options.log = &std::cerr;
  const auto result = run_bounded_search(l, seed, options);
  for (const auto& [r, c] : result.bounds) o.detail << "r=" << r << ":" << c << " ";
  for (const auto& [r, want] : kBounds) {
    const auto it = result.bounds.find(r);
    if (r == 19 && it == result.bounds.end() && result.aborted) continue;
    if (it == result.bounds.end()) {
      o.fail("no bound for r=" + std::to_string(r));
      continue;
    }
    if (r == 19 ? it->second > want : it->second != want)
      o.fail("r=" + std::to_string(r) + " bound " + std::to_string(it->second) + " want " + std::to_string(want));
  }
  if (result.aborted) o.detail << "(aborted: " << result.message << ")";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string tier = "fast";
  int threads = static_cast<int>(std::max(2U, std::thread::hardware_concurrency()));
  app.add_option("--tier", tier)->check(CLI::IsMember({"fast", "extended", "all"}));
  app.add_option("--threads", threads)->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  const bool fast = tier != "extended", extended = tier != "fast";

  if (fast) {
    run_check("1 table sub-grid 8x15", [&](Outcome& o) {
      SearchOptions options;
      options.threads = threads;
      compare_grid(run_search(limits_of(8, 15), options).table, 8, 15, o);
    });
    run_check("3 cubic graphs at r=8 c=12", check_cubic_graphs);
    run_check("5 oracle equivalence", check_oracles);
    run_check("6 property suites", [&](Outcome& o) { check_properties(o, threads); });
  }
  if (extended) {
    KeyArchive r13;
    run_check("2 table full grid 14x18", [&](Outcome& o) {
      SearchOptions options;
      options.threads = threads;
      options.log = &std::cerr;
      options.on_archive = [&](int r, const KeyArchive& a) {
        if (r == 13) r13 = a;
      };
      const auto result = run_search(limits_of(14, 18), options);
      if (result.overflow) o.fail(result.message);
      compare_grid(result.table, 14, 18, o);
    });
    run_check("4 bounded c_min search r=15..19", [&](Outcome& o) {
      if (r13.empty()) {
        o.fail("no r=13 archive");
        return;
      }
      check_bounded(o, r13, threads);
    });
  }
  return failures == 0 ? 0 : 1;
}
