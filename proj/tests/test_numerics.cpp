#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "qasumm/numerics.hpp"

using namespace qasumm;

TEST_CASE("softmax hand values") {
  const Vec a = softmax(Vec{0.0, 0.0});
  CHECK(a[0] == doctest::Approx(0.5));
  CHECK(a[1] == doctest::Approx(0.5));

  const Vec b = softmax(Vec{1000.0, 1000.0, 1000.0});
  for (double p : b) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  const double e = std::exp(1.0);
  const Vec c = softmax(Vec{1.0, 0.0});
  CHECK(c[0] == doctest::Approx(e / (e + 1.0)).epsilon(1e-14));
  CHECK(c[1] == doctest::Approx(1.0 / (e + 1.0)).epsilon(1e-14));
  CHECK(c[0] == doctest::Approx(0.73106).epsilon(1e-5));

  CHECK_THROWS_AS(softmax(Vec{}), std::invalid_argument);
}

TEST_CASE("softmax sums to one and ignores shifts") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    Vec v(1 + trial % 7);
    for (double& x : v) x = 40.0 * (uniform01(rng) - 0.5);
    const Vec p = softmax(v);
    double sum = 0.0;
    for (double x : p) {
      CHECK(x > 0.0);
      sum += x;
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);

    Vec shifted = v;
    for (double& x : shifted) x += 123.25;
    const Vec q = softmax(shifted);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(q[i] == doctest::Approx(p[i]).epsilon(1e-12));

    const Vec lp = log_softmax(v);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::exp(lp[i]) == doctest::Approx(p[i]).epsilon(1e-12));
  }
}

TEST_CASE("sigmoid identities") {
  CHECK(sigmoid(0.0) == 0.5);
  for (double x : {-30.0, -2.5, -1e-3, 0.7, 4.0, 50.0}) {
    CHECK(sigmoid(x) + sigmoid(-x) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(log_sigmoid(x) == doctest::Approx(std::log(sigmoid(x))).epsilon(1e-12));
  }
  CHECK(std::isfinite(log_sigmoid(-800.0)));
  CHECK(log_sigmoid(-800.0) == doctest::Approx(-800.0));
}

TEST_CASE("matrix kernels") {
  const Tensor w({2, 3}, {1, 2, 3, 4, 5, 6});
  const Vec y = matvec(w, Vec{1, 0, -1});
  CHECK(y == Vec{-2, -2});

  Vec z{0, 0, 0};
  matvec_t_add(w, Vec{1, 1}, z);
  CHECK(z == Vec{5, 7, 9});

  Tensor g({2, 3});
  outer_add(g, Vec{1, 2}, Vec{1, 0, 3}, 0.5);
  CHECK(g.data()[0] == 0.5);
  CHECK(g(1, 2) == 3.0);

  CHECK(dot(Vec{1, 2, 3}, Vec{4, 5, 6}) == 32.0);
  CHECK(concat(Vec{1}, Vec{2, 3}) == Vec{1, 2, 3});
}

TEST_CASE("param store rejects unknown names") {
  ParamStore s;
  s.add("w", Tensor({2, 2}, 1.0));
  CHECK(s.grad("w").shape() == s.value("w").shape());
  CHECK_THROWS_AS(s.value("missing"), std::out_of_range);
  CHECK_THROWS_AS(s.grad("missing"), std::out_of_range);
  CHECK(s.parameter_count() == 4);
}

namespace {

// Straight-line LSTM step, written independently of the library layout code.
void reference_lstm(const Vec& x, const Vec& h0, const Vec& c0, const Tensor& wx, const Tensor& wh,
                    const Tensor& b, Vec& h, Vec& c) {
  const std::size_t H = h0.size();
  h.assign(H, 0.0);
  c.assign(H, 0.0);
  auto pre = [&](std::size_t row) {
    double s = b[row];
    for (std::size_t j = 0; j < x.size(); ++j) s += wx(row, j) * x[j];
    for (std::size_t j = 0; j < H; ++j) s += wh(row, j) * h0[j];
    return s;
  };
  for (std::size_t k = 0; k < H; ++k) {
    const double i = 1.0 / (1.0 + std::exp(-pre(k)));
    const double f = 1.0 / (1.0 + std::exp(-pre(H + k)));
    const double o = 1.0 / (1.0 + std::exp(-pre(2 * H + k)));
    const double g = std::tanh(pre(3 * H + k));
    c[k] = f * c0[k] + i * g;
    h[k] = o * std::tanh(c[k]);
  }
}

}  // namespace

TEST_CASE("lstm cell zero weights") {
  ParamStore s;
  Rng rng(1);
  add_lstm_params(s, "cell", 3, 2, rng);
  for (const auto& n : s.names()) s.value(n).fill(0.0);
  const LstmWeights w = lstm_weights(s, "cell");

  LstmState zero = lstm_cell(Vec{0, 0, 0}, Vec{0, 0}, Vec{0, 0}, w);
  CHECK(zero.h == Vec{0, 0});
  CHECK(zero.c == Vec{0, 0});

  LstmState any = lstm_cell(Vec{5.0, -3.0, 1e3}, Vec{0, 0}, Vec{0, 0}, w);
  CHECK(any.h == Vec{0, 0});
}

TEST_CASE("lstm cell matches reference and forget bias starts at one") {
  ParamStore s;
  Rng rng(11);
  add_lstm_params(s, "cell", 3, 3, rng);
  const Tensor& b = s.value("cell.b");
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(b[k] == 0.0);
    CHECK(b[3 + k] == 1.0);
  }
  uniform_fill(s.value("cell.b"), -0.5, 0.5, rng);
  const Vec x{0.3, -0.7, 1.1}, h0{0.2, -0.1, 0.4}, c0{-0.3, 0.5, 0.05};
  const LstmState out = lstm_cell(x, h0, c0, lstm_weights(s, "cell"));
  Vec h, c;
  reference_lstm(x, h0, c0, s.value("cell.wx"), s.value("cell.wh"), s.value("cell.b"), h, c);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(out.h[k] == doctest::Approx(h[k]).epsilon(1e-14));
    CHECK(out.c[k] == doctest::Approx(c[k]).epsilon(1e-14));
    CHECK(std::abs(out.h[k]) < 1.0);
  }
  CHECK_THROWS(lstm_cell(Vec{1, 2}, h0, c0, lstm_weights(s, "cell")));
}

TEST_CASE("lstm cell backward matches finite differences") {
  ParamStore s;
  Rng rng(5);
  add_lstm_params(s, "cell", 3, 3, rng);
  uniform_fill(s.value("cell.b"), -0.5, 0.5, rng);
  s.add("x", Tensor({3}, {0.4, -0.9, 0.25}));
  s.add("h0", Tensor({3}, {0.1, 0.3, -0.6}));
  s.add("c0", Tensor({3}, {0.7, -0.2, 0.15}));

  // Objective: weighted sum of h and c, so every output coordinate matters.
  const Vec wh_out{1.0, -0.5, 0.75}, wc_out{0.3, 0.2, -0.9};
  auto f = [&](ParamStore& st, bool accumulate) {
    LstmStepCache cache;
    const LstmWeights w = lstm_weights(st, "cell");
    const LstmState out = lstm_cell(st.value("x").data(), st.value("h0").data(),
                                    st.value("c0").data(), w, &cache);
    if (accumulate) {
      LstmGrads g = lstm_grads(st, "cell");
      lstm_cell_backward(cache, w, wh_out, wc_out, g, st.grad("x").data(), st.grad("h0").data(),
                         st.grad("c0").data());
    }
    return dot(out.h, wh_out) + dot(out.c, wc_out);
  };
  const GradCheckResult r = grad_check(s, f, 1e-5);
  INFO("worst ", r.worst_param, "[", r.worst_index, "] analytic ", r.analytic, " numeric ", r.numeric);
  CHECK(r.max_rel_error < 1e-6);
}

TEST_CASE("grad_check basics") {
  ParamStore s;
  s.add("w", Tensor({1}, {3.0}));
  auto square = [](ParamStore& st, bool accumulate) {
    const double w = st.value("w")[0];
    if (accumulate) st.grad("w")[0] += 2.0 * w;
    return w * w;
  };
  const GradCheckResult r = grad_check(s, square);
  CHECK(r.analytic == doctest::Approx(6.0));
  CHECK(r.numeric == doctest::Approx(6.0).epsilon(1e-8));
  CHECK(r.max_rel_error < 1e-8);
  CHECK(s.value("w")[0] == 3.0);

  auto constant = [](ParamStore&, bool) { return 4.0; };
  const GradCheckResult k = grad_check(s, constant);
  CHECK(k.max_rel_error == 0.0);
  CHECK(k.numeric == 0.0);

  auto bad = [](ParamStore& st, bool) { return std::log(st.value("w")[0] - 3.0); };
  CHECK_THROWS_AS(grad_check(s, bad), std::domain_error);

  // A wrong analytic gradient is reported.
  auto wrong = [](ParamStore& st, bool accumulate) {
    const double w = st.value("w")[0];
    if (accumulate) st.grad("w")[0] += w;
    return w * w;
  };
  CHECK(grad_check(s, wrong).max_rel_error > 0.4);
}

TEST_CASE("seeded helpers are deterministic") {
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  Tensor a({4, 5}), b({4, 5});
  Rng r1(9), r2(9);
  xavier_uniform(a, r1);
  xavier_uniform(b, r2);
  CHECK(a == b);
  const double bound = std::sqrt(6.0 / 9.0);
  for (double v : a.data()) CHECK(std::abs(v) <= bound);
  Rng r3(4);
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform01(r3);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
