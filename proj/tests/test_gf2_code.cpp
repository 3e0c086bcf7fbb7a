#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "n1l/gf2_code.hpp"
#include "n1l/search.hpp"
#include "n1l/store.hpp"

using namespace n1l;

namespace {

// Minimum weight by listing every codeword of the span explicitly.
int brute_min_weight(const std::vector<EmbeddedWord>& gens) {
  std::vector<EmbeddedWord> words{EmbeddedWord{}};
  for (const auto& g : gens) {
    const std::size_t n = words.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto w = words[i] ^ g;
      if (std::find(words.begin(), words.end(), w) == words.end()) words.push_back(w);
    }
  }
  int best = 0;
  for (const auto& w : words)
    if (!w.is_zero() && (best == 0 || w.weight() < best)) best = w.weight();
  return best;
}

bool in_span(const std::vector<EmbeddedWord>& gens, const EmbeddedWord& target) {
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << gens.size()); ++m) {
    EmbeddedWord w{};
    for (std::size_t i = 0; i < gens.size(); ++i)
      if (m >> i & 1) w = w ^ gens[i];
    if (w == target) return true;
  }
  return false;
}

}  // namespace

TEST(Embedding, Words) {
  const auto w = embed_row(0b111, 0);
  EXPECT_EQ(w.support(5), (std::vector<int>{0, 1, 2, 5, 9}));
  EXPECT_EQ(w.weight(), 5);
  EXPECT_EQ(kAnchorWord.weight(), 5);
  EXPECT_EQ(kAnchorWord.support(5), (std::vector<int>{5, 6, 7, 8, 9}));

  const auto e = embed(fixtures::two_row_example());
  ASSERT_EQ(e.rows.size(), 2U);
  const auto meet = e.rows[0].support(5);
  const auto other = e.rows[1].support(5);
  std::vector<int> common;
  std::set_intersection(meet.begin(), meet.end(), other.begin(), other.end(), std::back_inserter(common));
  EXPECT_EQ(common, (std::vector<int>{2, 9}));  // body column 2 and i
  EXPECT_EQ(e.generators().size(), 3U);
}

TEST(Embedding, RejectsInvalid) {
  EXPECT_THROW(embed(Configuration::from_rows(4, {{0, {0, 1, 2}}})), Error);
}

TEST(SpanMinWeight, AnchorAlone) {
  const std::vector<EmbeddedWord> gens{kAnchorWord};
  const auto rep = span_min_weight(gens);
  EXPECT_EQ(rep.min_weight, 5);
  EXPECT_EQ(rep.rank, 1);
}

TEST(SpanMinWeight, TwoRowExample) {
  const auto gens = embed(fixtures::two_row_example()).generators();
  const auto rep = span_min_weight(gens);
  EXPECT_EQ(rep.min_weight, 5);
  EXPECT_EQ(rep.rank, 3);
  EXPECT_TRUE(is_n1l(fixtures::two_row_example()));
}

TEST(SpanMinWeight, K4Pattern) {
  const auto gens = embed(fixtures::k4_pattern()).generators();
  // The four rows sum to {a0,a1,a2,a3}; adding v leaves {i}.
  EXPECT_TRUE(in_span(gens, EmbeddedWord{0, 0x0F}));
  const auto rep = span_min_weight(gens);
  EXPECT_EQ(rep.min_weight, 1);
  EXPECT_EQ(rep.witness, (EmbeddedWord{0, 0x10}));
  EXPECT_EQ(rep.rank, 5);
  EXPECT_FALSE(is_n1l(fixtures::k4_pattern()));
}

TEST(SpanMinWeight, DependentGeneratorsSkipZeroSums) {
  const std::vector<EmbeddedWord> gens{kAnchorWord, kAnchorWord};
  const auto rep = span_min_weight(gens);
  EXPECT_EQ(rep.min_weight, 5);
  EXPECT_EQ(rep.rank, 1);
}

TEST(SpanMinWeight, MatchesBruteForce) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const auto cfg = fixtures::random_valid(1 + static_cast<int>(rng() % 10), 20, rng);
    const auto gens = embed(cfg).generators();
    const auto rep = span_min_weight(gens);
    EXPECT_EQ(rep.min_weight, brute_min_weight(gens));
    EXPECT_EQ(rep.witness.weight(), rep.min_weight);
    EXPECT_EQ(rep.min_weight <= 5, true);
    EXPECT_EQ(is_n1l(cfg), rep.min_weight == 5);
  }
}

TEST(Incremental, Examples) {
  const auto one = Configuration::from_rows(3, {{0, {0, 1, 2}}});
  EXPECT_TRUE(is_n1l_incremental(one, 0b11100, 1));
  EXPECT_TRUE(is_n1l_incremental(one, 0b111000, 1));
  const auto wider = Configuration::from_rows(6, {{0, {0, 1, 2}}});
  EXPECT_TRUE(is_n1l_incremental(wider, 0b111000, 0));
  EXPECT_TRUE(is_n1l(fixtures::same_class_pair()));
  EXPECT_TRUE(is_n1l(fixtures::cross_class_pair()));
}

TEST(Incremental, AgreesWithFullCheckOnSmallSearch) {
  // Every structurally valid extension of every class up to r = 5, c <= 10.
  SearchLimits limits;
  limits.max_rows = 5;
  limits.max_cols = 10;
  KeyArchive current = seed_archive(limits.max_cols);
  std::uint64_t checked = 0;
  for (int r = 2; r <= limits.max_rows; ++r) {
    for (std::size_t i = 0; i < current.size(); ++i) {
      const auto parent = decode_key(current[i]);
      const auto span = ExtensionFilter::from_span(parent);
      for (const auto& child : enumerate_extensions(parent, limits)) {
        // The new row is the last one of its class.
        int added = -1;
        for (int k = 0; k < kClassCount; ++k)
          if (child.partition().sizes[k] != parent.partition().sizes[k]) added = k;
        const Row row = child.row(child.partition().end(added) - 1);
        const bool full = is_n1l(child);
        ASSERT_EQ(is_n1l_incremental(parent, row, added), full);
        ASSERT_EQ(span.admits(row, added), full);
        ++checked;
      }
    }
    current = run_stage(current, limits, {});
  }
  EXPECT_GT(checked, 1000U);
}

TEST(Incremental, DuplicateRowInAnotherClass) {
  // The two words differ only in {a0, a2}, but a repeated row is not a
  // partial linear space, so the extension is rejected outright.
  const auto parent = Configuration::from_rows(3, {{0, {0, 1, 2}}});
  EXPECT_EQ((embed_row(0b111, 0) ^ embed_row(0b111, 2)).weight(), 2);
  try {
    is_n1l_incremental(parent, 0b111, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfiguration);
  }
  EXPECT_FALSE(ExtensionFilter::from_span(parent).admits(0b111, 2));
}

TEST(Goodness, Values) {
  EXPECT_EQ(goodness_measure(5, 1), (Rational{1, 1}));
  EXPECT_EQ(goodness_measure(5, 0), (Rational{1, 2}));
  for (int n = 0; n < 30; ++n) EXPECT_EQ(goodness_measure(n, n).num, 1U + n + n * (n - 1) / 2);
  EXPECT_EQ(goodness_measure(23, 12).to_string(), "277/2048");
  EXPECT_THROW(goodness_measure(3, 4), Error);
  EXPECT_THROW(goodness_measure(70, 0), Error);
}
