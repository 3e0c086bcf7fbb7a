#ifndef N1L_TESTS_FIXTURES_HPP
#define N1L_TESTS_FIXTURES_HPP

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "n1l/config.hpp"
#include "n1l/perm_s4.hpp"
#include "n1l/validity.hpp"

namespace fixtures {

using n1l::Configuration;

// Rows {0,1,2} in class 0 and {2,3,4} in class 1.
inline Configuration two_row_example() { return Configuration::from_rows(5, {{0, {0, 1, 2}}, {1, {2, 3, 4}}}); }

// One row per class, every pair meeting once.
inline Configuration k4_pattern() {
  return Configuration::from_rows(6, {{0, {0, 1, 2}}, {1, {0, 3, 4}}, {2, {1, 3, 5}}, {3, {2, 4, 5}}});
}

inline Configuration same_class_pair() { return Configuration::from_rows(6, {{0, {0, 1, 2}}, {0, {3, 4, 5}}}); }
inline Configuration cross_class_pair() { return Configuration::from_rows(6, {{0, {0, 1, 2}}, {1, {3, 4, 5}}}); }

// Relabels classes by alpha, shuffles rows within each class and permutes
// all columns.
inline Configuration random_isomorph(const Configuration& cfg, std::mt19937_64& rng) {
  const auto alpha = n1l::Perm4::from_index(static_cast<int>(rng() % n1l::kS4Order));
  std::vector<int> cols(cfg.num_cols());
  std::iota(cols.begin(), cols.end(), 0);
  std::shuffle(cols.begin(), cols.end(), rng);
  std::vector<std::pair<int, std::vector<int>>> rows;
  for (int i = 0; i < cfg.num_rows(); ++i) {
    std::vector<int> js;
    n1l::for_each_bit(cfg.row(i), [&](int j) { js.push_back(cols[j]); });
    rows.push_back({alpha(cfg.class_of(i)), js});
  }
  std::shuffle(rows.begin(), rows.end(), rng);
  return Configuration::from_rows(cfg.num_cols(), rows);
}

// A random valid N1' configuration grown row by row; may stop short of the
// requested row count when no row fits.
inline Configuration random_valid(int rows, int max_cols, std::mt19937_64& rng) {
  std::vector<std::pair<int, std::vector<int>>> spec;
  Configuration cfg = Configuration::from_rows(3, {{static_cast<int>(rng() % 4), {0, 1, 2}}});
  spec.push_back({cfg.class_of(0), {0, 1, 2}});
  int cols = 3;
  for (int attempt = 0; cfg.num_rows() < rows && attempt < 200; ++attempt) {
    const int universe = std::min(max_cols, cols + 3);
    std::vector<int> pick(universe);
    std::iota(pick.begin(), pick.end(), 0);
    std::shuffle(pick.begin(), pick.end(), rng);
    pick.resize(3);
    // New columns must be contiguous from cols.
    std::sort(pick.begin(), pick.end());
    int next = cols;
    for (int& j : pick)
      if (j >= cols) j = next++;
    auto trial = spec;
    trial.push_back({static_cast<int>(rng() % 4), pick});
    Configuration cand = Configuration::from_rows(next, trial);
    if (n1l::is_valid_n1_prime(cand)) {
      spec = trial;
      cfg = cand;
      cols = next;
    }
  }
  return cfg;
}

}  // namespace fixtures

#endif  // N1L_TESTS_FIXTURES_HPP
