// n1l: enumerate and inspect N1' / N1L' configurations.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "n1l/canon.hpp"
#include "n1l/config.hpp"
#include "n1l/gf2_code.hpp"
#include "n1l/perm_s4.hpp"
#include "n1l/search.hpp"
#include "n1l/validity.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

using json = nlohmann::json;

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw n1l::Error(n1l::ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw n1l::Error(n1l::ErrorCode::Io, "cannot open " + path + " for writing");
  out << text;
  if (!out) throw n1l::Error(n1l::ErrorCode::Io, "write failed for " + path);
}

json stage_json(const n1l::StageReport& s) {
  json per = json::object();
  for (std::size_t c = 0; c < s.per_cols.size(); ++c)
    if (s.per_cols[c] != 0) per[std::to_string(c)] = s.per_cols[c];
  return {{"rows", s.rows},       {"parents", s.parents}, {"extensions", s.extensions},
          {"classes", s.classes}, {"per_cols", per},      {"seconds", s.seconds}};
}

void emit_manifest(const json& manifest, const std::string& manifest_path, const std::string& out_path) {
  std::string path = manifest_path;
  if (path.empty() && !out_path.empty() && out_path != "-") path = out_path + ".manifest.json";
  if (path.empty()) {
    std::cerr << manifest.dump(2) << std::endl;
    return;
  }
  write_text(path, manifest.dump(2) + "\n");
}

std::string archive_path(const std::string& dir, int rows) {
  return (std::filesystem::path(dir) / ("stage_r" + std::to_string(rows) + ".n1la")).string();
}

struct SearchFlags {
  int max_rows = 0;
  int max_cols = 0;
  bool no_filter = false;
  int threads = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  std::string out;
  std::string archive_dir;
  std::string manifest;
  std::size_t memory_limit_mb = 4096;
  bool grouped = false;
  bool quiet = false;
};

int cmd_search(const SearchFlags& f, const std::vector<std::string>& argv) {
  n1l::SearchLimits limits;
  limits.max_rows = f.max_rows;
  limits.max_cols = f.max_cols;
  limits.n1l_filter = !f.no_filter;
  n1l::SearchOptions options;
  options.threads = f.threads;
  options.memory_limit_bytes = f.memory_limit_mb << 20;
  options.grouped_signature = f.grouped;
  options.log = f.quiet ? nullptr : &std::cerr;
  if (!f.archive_dir.empty()) {
    std::filesystem::create_directories(f.archive_dir);
    options.on_archive = [&](int r, const n1l::KeyArchive& a) { a.write(archive_path(f.archive_dir, r)); };
  }
  const std::string started = utc_now();
  const auto result = n1l::run_search(limits, options);
  write_text(f.out, result.table.to_tsv());

  json manifest = {{"command", argv},
                   {"mode", "full"},
                   {"limits", {{"max_rows", limits.max_rows}, {"max_cols", limits.max_cols},
                               {"n1l_filter", limits.n1l_filter}}},
                   {"threads", options.threads},
                   {"outputs", {{"counts", f.out.empty() ? "-" : f.out}, {"archive_dir", f.archive_dir}}},
                   {"started", started},
                   {"finished", utc_now()},
                   {"overflow", result.overflow}};
  json stages = json::array();
  for (const auto& s : result.stages) stages.push_back(stage_json(s));
  manifest["stages"] = stages;
  json ratios = json::array();
  for (const auto& row : n1l::report_ratio(result.table))
    if (row.rows >= 2) ratios.push_back({{"r", row.rows}, {"cmin", row.cmin}, {"ratio", row.ratio.to_string()}});
  manifest["ratios"] = ratios;
  emit_manifest(manifest, f.manifest, f.out);

  if (result.overflow) {
    std::cerr << "error: " << result.message << std::endl;
    return kExitRuntime;
  }
  return 0;
}

struct BoundedFlags {
  std::string seed_archive;
  int max_rows = 19;
  int max_cols = n1l::kMaxCols;
  int max_new_cols = 2;
  int keep_cmin = 2;
  std::vector<int> seed_cols;
  int threads = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  std::string out;
  std::string archive_dir;
  std::string manifest;
  std::size_t memory_limit_mb = 4096;
  bool quiet = false;
};

int cmd_bounded_search(const BoundedFlags& f, const std::vector<std::string>& argv) {
  n1l::SearchLimits limits;
  limits.mode = n1l::SearchMode::Bounded;
  limits.max_rows = f.max_rows;
  limits.max_cols = f.max_cols;
  limits.max_new_cols_per_step = f.max_new_cols;
  limits.keep_cmin_count = f.keep_cmin;
  n1l::SearchOptions options;
  options.threads = f.threads;
  options.memory_limit_bytes = f.memory_limit_mb << 20;
  options.log = f.quiet ? nullptr : &std::cerr;
  if (!f.archive_dir.empty()) {
    std::filesystem::create_directories(f.archive_dir);
    options.on_archive = [&](int r, const n1l::KeyArchive& a) { a.write(archive_path(f.archive_dir, r)); };
  }

  const auto archive = n1l::KeyArchive::read(f.seed_archive);
  std::vector<int> keep = f.seed_cols;
  if (keep.empty()) {
    keep = archive.column_counts();
    if (static_cast<int>(keep.size()) > f.keep_cmin) keep.resize(f.keep_cmin);
  }
  const auto seed = archive.filtered([&](int c) { return std::find(keep.begin(), keep.end(), c) != keep.end(); });

  const std::string started = utc_now();
  const auto result = n1l::run_bounded_search(limits, seed, options);
  std::ostringstream tsv;
  tsv << "r\tcMinUpperBound\n";
  for (const auto& [r, c] : result.bounds) tsv << r << '\t' << c << '\n';
  write_text(f.out, tsv.str());

  json stages = json::array();
  for (const auto& s : result.stages) stages.push_back(stage_json(s));
  json manifest = {{"command", argv},
                   {"mode", "bounded"},
                   {"limits", {{"max_rows", limits.max_rows}, {"max_cols", limits.max_cols},
                               {"max_new_cols_per_step", limits.max_new_cols_per_step},
                               {"keep_cmin_count", limits.keep_cmin_count}}},
                   {"seed", {{"archive", f.seed_archive}, {"rows", seed.rows()}, {"cols", keep},
                             {"classes", seed.size()}}},
                   {"threads", options.threads},
                   {"outputs", {{"bounds", f.out.empty() ? "-" : f.out}, {"archive_dir", f.archive_dir}}},
                   {"started", started},
                   {"finished", utc_now()},
                   {"stages", stages},
                   {"aborted", result.aborted},
                   {"abort_reason", result.message}};
  emit_manifest(manifest, f.manifest, f.out);
  if (result.aborted) std::cerr << "aborted: " << result.message << std::endl;
  return 0;
}

std::string support_string(const n1l::EmbeddedWord& w, int cols) {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (int j : w.support(cols)) {
    out << (first ? "" : ",");
    if (j < cols) out << j;
    else if (j < cols + 4) out << 'a' << (j - cols);
    else out << 'i';
    first = false;
  }
  out << '}';
  return out.str();
}

int cmd_verify(const std::string& path) {
  const auto cfg = n1l::parse_text(read_file(path));
  const auto rep = n1l::validity_report(cfg);
  auto yes = [](bool b) { return b ? "pass" : "FAIL"; };
  std::cout << "rows=" << cfg.num_rows() << " cols=" << cfg.num_cols() << "\n";
  std::cout << "row-weight: " << yes(rep.row_weight) << "\n";
  std::cout << "zero-column: " << yes(rep.no_zero_column) << "\n";
  std::cout << "part-disjointness: " << yes(rep.part_disjoint) << "\n";
  std::cout << "partial-linear-space: " << yes(rep.partial_linear_space) << "\n";
  std::cout << "valid-n1-prime: " << (rep.ok() ? "true" : "false") << "\n";
  if (!rep.ok()) {
    std::cout << "first-failure: " << rep.first_failure() << "\n";
    return 0;
  }
  const auto span = n1l::span_min_weight(n1l::embed(cfg).generators());
  std::cout << "is-n1l: " << (span.min_weight == 5 ? "true" : "false") << "\n";
  std::cout << "min-weight: " << span.min_weight << "\n";
  std::cout << "rank: " << span.rank << "\n";
  std::cout << "witness: " << support_string(span.witness, cfg.num_cols()) << "\n";
  std::cout << "goodness: " << n1l::goodness_measure(cfg.num_cols() + 5, span.rank).to_string() << "\n";
  return 0;
}

int cmd_canon(const std::string& path, bool oracle) {
  const auto cfg = n1l::parse_text(read_file(path));
  n1l::Configuration canon;
  if (oracle) {
    if (!n1l::is_valid_n1_prime(cfg))
      throw n1l::Error(n1l::ErrorCode::InvalidConfiguration, "not a valid N1' configuration");
    canon = n1l::brute_force_canonical(cfg);
  } else {
    canon = n1l::canonical_form(cfg).config;
  }
  const std::string key = n1l::encode_key(canon);
  std::cout << n1l::serialize_text(canon);
  std::ostringstream digest;
  digest << std::hex << std::setw(16) << std::setfill('0') << n1l::fnv1a64(key);
  std::cout << "# key " << n1l::to_hex(key) << "\n";
  std::cout << "# digest " << digest.str() << "\n";
  return 0;
}

int cmd_replicate(const std::string& path, int copies, const std::string& out) {
  const auto cfg = n1l::parse_text(read_file(path));
  if (!n1l::is_valid_n1_prime(cfg))
    throw n1l::Error(n1l::ErrorCode::InvalidConfiguration, "not a valid N1' configuration");
  write_text(out, n1l::serialize_text(n1l::normalize_layout(n1l::replicate(cfg, copies))));
  return 0;
}

int cmd_stats() {
  std::cout << "subgroups: " << n1l::s4_subgroups().size() << ", cosets: " << n1l::s4_coset_count() << "\n";
  std::cout << "orders:";
  for (const auto& [order, count] : n1l::subgroup_order_census()) std::cout << ' ' << order << ':' << count;
  std::cout << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Isomorph-free enumeration of N1' and N1L' configurations"};
  app.require_subcommand(1);

  SearchFlags sf;
  auto* search = app.add_subcommand("search", "exhaustive staged search; writes the counts grid as TSV");
  search->add_option("--max-rows", sf.max_rows, "largest row count")->required()->check(CLI::Range(1, 38));
  search->add_option("--max-cols", sf.max_cols, "largest column count")->required()->check(CLI::Range(3, 64));
  search->add_flag("--no-n1l-filter", sf.no_filter, "count N1' configurations without the span condition");
  search->add_option("--threads", sf.threads, "worker threads")->check(CLI::PositiveNumber);
  search->add_option("--out", sf.out, "counts TSV path (default: stdout)");
  search->add_option("--archive-dir", sf.archive_dir, "write stage_r<r>.n1la archives here");
  search->add_option("--manifest", sf.manifest, "run manifest path (default: <out>.manifest.json or stderr)");
  search->add_option("--memory-limit-mb", sf.memory_limit_mb, "stage store memory cap")->check(CLI::PositiveNumber);
  search->add_flag("--grouped-signature", sf.grouped, "use weight-grouped signature canonicalization");
  search->add_flag("--quiet", sf.quiet, "no progress output");

  BoundedFlags bf;
  auto* bounded = app.add_subcommand("bounded-search", "bounded extension search for c_min upper bounds");
  bounded->add_option("--seed-archive", bf.seed_archive, "stage archive to start from")->required();
  bounded->add_option("--max-rows", bf.max_rows, "largest row count")->check(CLI::Range(2, 38));
  bounded->add_option("--max-cols", bf.max_cols, "column cap")->check(CLI::Range(3, 64));
  bounded->add_option("--max-new-cols", bf.max_new_cols, "fresh columns per added row")->check(CLI::Range(0, 3));
  bounded->add_option("--keep-cmin", bf.keep_cmin, "distinct smallest column counts kept per stage")
      ->check(CLI::PositiveNumber);
  bounded->add_option("--seed-cols", bf.seed_cols, "column counts of the seed to use (default: smallest)")
      ->delimiter(',');
  bounded->add_option("--threads", bf.threads, "worker threads")->check(CLI::PositiveNumber);
  bounded->add_option("--out", bf.out, "bounds TSV path (default: stdout)");
  bounded->add_option("--archive-dir", bf.archive_dir, "write retained stage archives here");
  bounded->add_option("--manifest", bf.manifest, "run manifest path");
  bounded->add_option("--memory-limit-mb", bf.memory_limit_mb, "stage store memory cap")->check(CLI::PositiveNumber);
  bounded->add_flag("--quiet", bf.quiet, "no progress output");

  std::string verify_path;
  auto* verify = app.add_subcommand("verify", "run every check on a configuration file");
  verify->add_option("file", verify_path)->required();

  std::string canon_path;
  bool canon_oracle = false;
  auto* canon = app.add_subcommand("canon", "print the canonical form and its key");
  canon->add_option("file", canon_path)->required();
  canon->add_flag("--oracle", canon_oracle, "use the exhaustive reference (r <= 5, c <= 9)");

  std::string rep_path, rep_out;
  int copies = 0;
  auto* replicate = app.add_subcommand("replicate", "block-diagonal replication of each row class");
  replicate->add_option("file", rep_path)->required();
  replicate->add_option("--copies,-m", copies, "number of copies")->required()->check(CLI::PositiveNumber);
  replicate->add_option("--out", rep_out, "output path (default: stdout)");

  auto* stats = app.add_subcommand("stats", "print the S4 subgroup and coset census");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*search) return cmd_search(sf, args);
    if (*bounded) return cmd_bounded_search(bf, args);
    if (*verify) return cmd_verify(verify_path);
    if (*canon) return cmd_canon(canon_path, canon_oracle);
    if (*replicate) return cmd_replicate(rep_path, copies, rep_out);
    if (*stats) return cmd_stats();
  } catch (const n1l::Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return e.code() == n1l::ErrorCode::InvalidArgument ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitRuntime;
  }
  return kExitUsage;
}
