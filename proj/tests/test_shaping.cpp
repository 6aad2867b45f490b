#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <spdlog/spdlog.h>

#include "qasumm/shaping.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace qasumm;
using qasumm::testing::words;

TEST_CASE("length penalty") {
  CHECK(length_penalty(SummaryMask{1, 1, 0, 0, 0}, 0.4) == doctest::Approx(0.0));
  CHECK(length_penalty(SummaryMask(7, 1), 0.4) == doctest::Approx(0.6));
  CHECK(length_penalty(SummaryMask{1, 0, 0, 0, 0, 0, 0, 0, 0, 0}, 0.4) == doctest::Approx(0.3));
}

TEST_CASE("fluency penalty") {
  CHECK(fluency_penalty(SummaryMask{0, 1, 1, 0}) == 2.0);
  CHECK(fluency_penalty(SummaryMask(6, 1)) == 0.0);
  CHECK(fluency_penalty(SummaryMask(6, 0)) == 0.0);
  CHECK(fluency_penalty(SummaryMask{1, 0, 1, 0, 1}) == 4.0);
  CHECK(fluency_penalty(SummaryMask{1}) == 0.0);
}

TEST_CASE("bigram recall") {
  const auto source = words("a b x c");
  const std::vector<std::vector<std::string>> ref{words("a b c")};
  CHECK(bigram_recall(SummaryMask{1, 1, 0, 0}, source, ref) == doctest::Approx(0.5));
  CHECK(bigram_recall(SummaryMask{0, 0, 0, 0}, source, ref) == 0.0);

  const auto full = words("a b c");
  CHECK(bigram_recall(SummaryMask{1, 1, 1}, full, ref) == doctest::Approx(1.0));

  // A gap breaks adjacency unless cross_gaps is set.
  const auto gapped = words("b q c");
  CHECK(bigram_recall(SummaryMask{1, 0, 1}, gapped, ref) == 0.0);
  CHECK(bigram_recall(SummaryMask{1, 0, 1}, gapped, ref, {true, false}) == doctest::Approx(0.5));

  // Bigrams do not cross abstract sentence boundaries.
  const std::vector<std::vector<std::string>> split{words("a b"), words("c d")};
  CHECK(bigram_recall(SummaryMask{1, 1}, words("b c"), split) == 0.0);

  // Set versus multiset semantics.
  const std::vector<std::vector<std::string>> rep{words("a b a b")};
  CHECK(bigram_recall(SummaryMask{1, 1, 0}, words("a b z"), rep) == doctest::Approx(0.5));
  CHECK(bigram_recall(SummaryMask{1, 1, 0}, words("a b z"), rep, {false, true}) ==
        doctest::Approx(1.0 / 3.0));

  const std::vector<std::vector<std::string>> single{words("a")};
  CHECK(bigram_recall(SummaryMask{1, 1}, words("a a"), single) == 0.0);
}

TEST_CASE("composite reward") {
  const RewardWeights w{8, 10, 20, 0.4};
  const RewardBreakdown r = total_reward(-1.0, 0.5, 2.0, 0.0, w);
  CHECK(r.total == doctest::Approx(-17.0));
  CHECK(r.r_b == 0.5);
  CHECK(r.gamma == 8.0);
  CHECK(total_reward(0, 0, 0, 0, w).total == 0.0);

  const RewardBreakdown a = total_reward(-2.0, 0.3, 3.0, 0.1, w);
  const RewardBreakdown b = total_reward(-2.0, 0.3, 3.0, 0.1, RewardWeights{8, 20, 40, 0.4});
  CHECK(b.total - b.r_a - 8 * b.r_b == doctest::Approx(2.0 * (a.total - a.r_a - 8 * a.r_b)));
}

TEST_CASE("random masks agree with brute-force recomputation") {
  // Degenerate abstracts are expected here; keep their warnings out of the log.
  spdlog::set_level(spdlog::level::err);
  Rng rng(2718);
  const std::vector<std::string> pool{"a", "b", "c", "d"};
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    SummaryMask y(n);
    std::vector<std::string> source(n);
    for (std::size_t t = 0; t < n; ++t) {
      y[t] = static_cast<std::uint8_t>(rng() % 2);
      source[t] = pool[rng() % pool.size()];
    }
    std::vector<std::vector<std::string>> abstract(1 + rng() % 3);
    for (auto& s : abstract) {
      s.resize(rng() % 6);
      for (auto& w : s) w = pool[rng() % pool.size()];
    }
    CHECK(length_penalty(y, 0.4) == oracle::length_penalty(y, 0.4));
    CHECK(fluency_penalty(y) == oracle::fluency_penalty(y));
    CHECK(fluency_penalty(y) == oracle::fluency_closed_form(y));
    CHECK(bigram_recall(y, source, abstract) == oracle::bigram_recall(y, source, abstract));
    const double r = bigram_recall(y, source, abstract);
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
  }
}

TEST_CASE("bigram recall grows with contiguous extensions") {
  Rng rng(5);
  const std::vector<std::string> pool{"a", "b", "c"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> source(12);
    for (auto& w : source) w = pool[rng() % 3];
    const std::vector<std::vector<std::string>> ref{{pool[rng() % 3], pool[rng() % 3], pool[rng() % 3]}};
    SummaryMask y(12, 0);
    std::size_t lo = rng() % 12, hi = lo + 1;
    y[lo] = 1;
    double last = bigram_recall(y, source, ref);
    while (lo > 0 || hi < 12) {
      if (lo > 0 && (hi == 12 || rng() % 2 == 0)) {
        y[--lo] = 1;
      } else {
        y[hi++] = 1;
      }
      const double now = bigram_recall(y, source, ref);
      CHECK(now >= last);
      last = now;
    }
  }
}

TEST_CASE("segments") {
  const SummaryMask y{0, 1, 1, 0, 1, 0, 0, 1};
  const auto segs = selected_segments(y);
  REQUIRE(segs.size() == 3);
  CHECK(segs[0] == Span{1, 3});
  CHECK(segs[2] == Span{7, 8});
  CHECK(selected_count(y) == 4);
  const std::vector<std::string> toks = words("a b c d e f g h");
  CHECK(select<std::string>(toks, y) == words("b c e h"));
}
