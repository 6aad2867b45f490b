#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qasumm/encoders.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace qasumm;

namespace {

struct Setup {
  ParamStore store;
  BiLstmEncoder enc{"enc", "embed", 2, 3};

  explicit Setup(std::uint64_t seed, std::size_t vocab = 5) {
    Rng rng(seed);
    Tensor embed({vocab, 2});
    uniform_fill(embed, -1.0, 1.0, rng);
    store.add("embed", std::move(embed));
    enc.add_params(store, rng);
  }
};

bool all_zero(const std::vector<Vec>& states) {
  for (const Vec& s : states) {
    for (double x : s) {
      if (x != 0.0) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("zero recurrent weights give zero states") {
  Setup s(1);
  for (const auto& name : s.store.names()) {
    if (name != "embed") s.store.value(name).fill(0.0);
  }
  const std::vector<int> tokens{1, 2, 3, 4};
  const EncodedSeq seq = s.enc.encode(s.store, tokens);
  CHECK(seq.size() == 4);
  CHECK(seq.dim() == 6);
  CHECK(all_zero(seq.states));

  const QuestionVec q = s.enc.encode_question(s.store, tokens);
  CHECK(q.q == Vec(6, 0.0));
  const std::vector<int> reversed{4, 3, 2, 1};
  const QuestionVec r = s.enc.encode_question(s.store, reversed);
  CHECK(r.q == q.q);
}

TEST_CASE("length-one input runs one step per direction") {
  Setup s(2);
  const std::vector<int> tokens{3};
  const EncodedSeq seq = s.enc.encode(s.store, tokens);
  REQUIRE(seq.size() == 1);
  CHECK(seq.fwd_steps.size() == 1);
  CHECK(seq.bwd_steps.size() == 1);
  const auto ref = oracle::bilstm(s.store, "enc", tokens);
  const Vec expected = ref.states()[0];
  for (std::size_t i = 0; i < 6; ++i) CHECK(seq.states[0][i] == doctest::Approx(expected[i]).epsilon(1e-14));
}

TEST_CASE("states and question match the scalar reference") {
  Setup s(3);
  const std::vector<int> tokens{0, 4, 2, 2, 1};
  const EncodedSeq seq = s.enc.encode(s.store, tokens);
  const auto ref = oracle::bilstm(s.store, "enc", tokens);
  const auto states = ref.states();
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    for (std::size_t i = 0; i < 6; ++i) CHECK(seq.states[t][i] == doctest::Approx(states[t][i]).epsilon(1e-13));
  }
  // Question vector: last forward output and the backward output at position 0.
  const QuestionVec q = s.enc.encode_question(s.store, tokens);
  CHECK(q.q == seq.question().q);
  Vec manual(seq.states.back().begin(), seq.states.back().begin() + 3);
  manual.insert(manual.end(), seq.states.front().begin() + 3, seq.states.front().end());
  CHECK(q.q == manual);
}

TEST_CASE("encoding errors") {
  Setup s(4);
  CHECK_THROWS_AS(s.enc.encode(s.store, std::vector<int>{}), std::invalid_argument);
  CHECK_THROWS_AS(s.enc.encode(s.store, std::vector<int>{9}), std::out_of_range);
}

TEST_CASE("gradient of weighted state sum matches finite differences") {
  Setup s(5);
  const std::vector<int> tokens{1, 3, 0, 3};
  Rng rng(6);
  std::vector<Vec> weights(tokens.size(), Vec(6));
  for (auto& w : weights) {
    for (double& x : w) x = uniform01(rng) - 0.5;
  }
  auto f = [&](ParamStore& st, bool accumulate) {
    const EncodedSeq seq = s.enc.encode(st, tokens);
    double total = 0.0;
    for (std::size_t t = 0; t < seq.size(); ++t) total += dot(seq.states[t], weights[t]);
    if (accumulate) s.enc.backward(st, seq, weights);
    return total;
  };
  const GradCheckResult r = grad_check(s.store, f);
  INFO(r.worst_param, "[", r.worst_index, "] ", r.analytic, " vs ", r.numeric);
  CHECK(r.max_rel_error < 1e-4);

  // Plain sum(states) as well.
  auto g = [&](ParamStore& st, bool accumulate) {
    const EncodedSeq seq = s.enc.encode(st, tokens);
    double total = 0.0;
    for (const Vec& v : seq.states) {
      for (double x : v) total += x;
    }
    if (accumulate) s.enc.backward(st, seq, std::vector<Vec>(seq.size(), Vec(6, 1.0)));
    return total;
  };
  CHECK(grad_check(s.store, g).max_rel_error < 1e-4);
}

TEST_CASE("question gradient routes through the end states") {
  Setup s(7);
  const std::vector<int> tokens{2, 1, 4};
  const Vec w{0.3, -0.2, 0.9, -0.4, 0.1, 0.6};
  auto f = [&](ParamStore& st, bool accumulate) {
    const EncodedSeq seq = s.enc.encode(st, tokens);
    if (accumulate) {
      std::vector<Vec> d(seq.size(), Vec(6, 0.0));
      BiLstmEncoder::add_question_grad(seq, w, d);
      s.enc.backward(st, seq, d);
    }
    return dot(seq.question().q, w);
  };
  CHECK(grad_check(s.store, f).max_rel_error < 1e-4);
}

TEST_CASE("dropout") {
  Setup s(8);
  const std::vector<int> tokens{1, 2, 3};
  const EncodedSeq a = s.enc.encode(s.store, tokens);
  const EncodedSeq b = s.enc.encode(s.store, tokens, Dropout{0.5, nullptr});
  CHECK(a.states == b.states);

  Rng r1(3), r2(3);
  const EncodedSeq c = s.enc.encode(s.store, tokens, Dropout{0.5, &r1});
  const EncodedSeq d = s.enc.encode(s.store, tokens, Dropout{0.5, &r2});
  CHECK(c.states == d.states);
  CHECK(c.fwd_masks.size() == 3);

  Rng r3(4);
  const Vec m = Dropout{0.25, &r3}.mask(10000);
  double mean = 0.0;
  for (double x : m) {
    CHECK((x == 0.0 || x == doctest::Approx(1.0 / 0.75)));
    mean += x;
  }
  CHECK(mean / 10000.0 == doctest::Approx(1.0).epsilon(0.03));

  // Gradient through a fixed dropout mask.
  Rng r4(12);
  const EncodedSeq fixed = s.enc.encode(s.store, tokens, Dropout{0.3, &r4});
  auto f = [&](ParamStore& st, bool accumulate) {
    // Same seed, so the same masks as `fixed`.
    Rng again(12);
    const EncodedSeq seq = s.enc.encode(st, tokens, Dropout{0.3, &again});
    CHECK(seq.fwd_masks == fixed.fwd_masks);
    double total = 0.0;
    for (const Vec& v : seq.states) total += v[0] - 0.5 * v[4];
    if (accumulate) {
      std::vector<Vec> d(seq.size(), Vec(6, 0.0));
      for (auto& v : d) {
        v[0] = 1.0;
        v[4] = -0.5;
      }
      s.enc.backward(st, seq, d);
    }
    return total;
  };
  CHECK(fixed.fwd_masks.size() == 3);
  CHECK(grad_check(s.store, f).max_rel_error < 1e-4);
}
