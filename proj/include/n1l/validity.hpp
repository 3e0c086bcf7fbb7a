#ifndef N1L_VALIDITY_HPP
#define N1L_VALIDITY_HPP

#include <string>

#include "n1l/config.hpp"

namespace n1l {

/// Every pair of distinct rows shares at most one column.
inline bool check_partial_linear_space(const Configuration& cfg) {
  auto rows = cfg.rows();
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = a + 1; b < rows.size(); ++b)
      if (popcount(rows[a] & rows[b]) > 1) return false;
  return true;
}

/// Column-pair form of the same condition: no two columns meet in two rows.
inline bool check_partial_linear_space_by_columns(const Configuration& cfg) {
  for (int j = 0; j < cfg.num_cols(); ++j)
    for (int k = j + 1; k < cfg.num_cols(); ++k) {
      int both = 0;
      for (Row row : cfg.rows()) both += ((row >> j) & 1) && ((row >> k) & 1);
      if (both > 1) return false;
    }
  return true;
}

inline bool check_part_disjointness(const Configuration& cfg) {
  for (int k = 0; k < kClassCount; ++k) {
    Row seen = 0;
    for (Row row : cfg.class_rows(k)) {
      if (seen & row) return false;
      seen |= row;
    }
  }
  return true;
}

/// Outcome of each N1' check, in the order they are evaluated.
struct ValidityReport {
  bool row_weight = false;
  bool no_zero_column = false;
  bool part_disjoint = false;
  bool partial_linear_space = false;

  bool ok() const { return row_weight && no_zero_column && part_disjoint && partial_linear_space; }

  /// Name of the first failing check, or empty if all pass.
  std::string first_failure() const {
    if (!row_weight) return "row-weight";
    if (!no_zero_column) return "zero-column";
    if (!part_disjoint) return "part-disjointness";
    if (!partial_linear_space) return "partial-linear-space";
    return {};
  }
};

/// Runs all checks without short-circuiting, for reporting.
inline ValidityReport validity_report(const Configuration& cfg) {
  ValidityReport rep;
  rep.row_weight = true;
  Row used = 0;
  for (Row row : cfg.rows()) {
    rep.row_weight = rep.row_weight && popcount(row) == 3;
    used |= row;
  }
  rep.no_zero_column = used == low_mask(cfg.num_cols());
  rep.part_disjoint = check_part_disjointness(cfg);
  rep.partial_linear_space = check_partial_linear_space(cfg);
  return rep;
}

/// Row weight 3, no zero column, disjoint rows within each class, and a
/// partial linear space. The 4-class bound holds by construction.
inline bool is_valid_n1_prime(const Configuration& cfg) {
  Row used = 0;
  for (Row row : cfg.rows()) {
    if (popcount(row) != 3) return false;
    used |= row;
  }
  if (used != low_mask(cfg.num_cols())) return false;
  return check_part_disjointness(cfg) && check_partial_linear_space(cfg);
}

}  // namespace n1l

#endif  // N1L_VALIDITY_HPP
