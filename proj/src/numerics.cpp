#include "qasumm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qasumm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_len(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(got) + " vs " + std::to_string(want) + ")");
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t s = splitmix64(base);
  for (std::uint64_t k : keys) s = splitmix64(s ^ splitmix64(k));
  return s;
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

Vec softmax(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("softmax of empty vector");
  const double m = *std::max_element(v.begin(), v.end());
  Vec out(v.size());
  double z = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - m);
    z += out[i];
  }
  for (double& x : out) x /= z;
  return out;
}

Vec log_softmax(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("log_softmax of empty vector");
  const double m = *std::max_element(v.begin(), v.end());
  double z = 0.0;
  for (double x : v) z += std::exp(x - m);
  const double lz = m + std::log(z);
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - lz;
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_len(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Vec matvec(const Tensor& w, std::span<const double> x) {
  check_len(x.size(), w.cols(), "matvec");
  Vec y(w.rows(), 0.0);
  for (std::size_t r = 0; r < w.rows(); ++r) y[r] = dot(w.row(r), x);
  return y;
}

void matvec_t_add(const Tensor& w, std::span<const double> x, std::span<double> y) {
  check_len(x.size(), w.rows(), "matvec_t");
  check_len(y.size(), w.cols(), "matvec_t");
  for (std::size_t r = 0; r < w.rows(); ++r) {
    if (x[r] != 0.0) axpy(x[r], w.row(r), y);
  }
}

void outer_add(Tensor& g, std::span<const double> a, std::span<const double> b, double scale) {
  check_len(a.size(), g.rows(), "outer");
  check_len(b.size(), g.cols(), "outer");
  for (std::size_t r = 0; r < a.size(); ++r) {
    const double s = scale * a[r];
    if (s != 0.0) axpy(s, b, g.row(r));
  }
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  check_len(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

Vec concat(std::span<const double> a, std::span<const double> b) {
  Vec out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void xavier_uniform(Tensor& w, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  uniform_fill(w, -limit, limit, rng);
}

void uniform_fill(Tensor& t, double lo, double hi, Rng& rng) {
  for (double& x : t.data()) x = lo + (hi - lo) * uniform01(rng);
}

void add_lstm_params(ParamStore& store, const std::string& prefix, std::size_t input,
                     std::size_t hidden, Rng& rng) {
  Tensor wx({4 * hidden, input});
  Tensor wh({4 * hidden, hidden});
  Tensor b({4 * hidden});
  xavier_uniform(wx, rng);
  xavier_uniform(wh, rng);
  for (std::size_t k = 0; k < hidden; ++k) b[hidden + k] = 1.0;  // forget gate
  store.add(prefix + ".wx", std::move(wx));
  store.add(prefix + ".wh", std::move(wh));
  store.add(prefix + ".b", std::move(b));
}

LstmWeights lstm_weights(const ParamStore& store, const std::string& prefix) {
  return {store.value(prefix + ".wx"), store.value(prefix + ".wh"), store.value(prefix + ".b")};
}

LstmGrads lstm_grads(ParamStore& store, const std::string& prefix) {
  return {store.grad(prefix + ".wx"), store.grad(prefix + ".wh"), store.grad(prefix + ".b")};
}

LstmState lstm_cell(std::span<const double> x, std::span<const double> h_prev,
                    std::span<const double> c_prev, const LstmWeights& w, LstmStepCache* cache) {
  const std::size_t h = w.hidden();
  check_len(w.wx.rows(), 4 * h, "lstm wx rows");
  check_len(w.wh.rows(), 4 * h, "lstm wh rows");
  check_len(x.size(), w.input(), "lstm input");
  check_len(h_prev.size(), h, "lstm h_prev");
  check_len(c_prev.size(), h, "lstm c_prev");

  Vec z = matvec(w.wx, x);
  for (std::size_t r = 0; r < 4 * h; ++r) z[r] += dot(w.wh.row(r), h_prev) + w.b[r];

  LstmState out{Vec(h), Vec(h)};
  Vec gi(h), gf(h), go(h), gg(h), tc(h);
  for (std::size_t k = 0; k < h; ++k) {
    gi[k] = sigmoid(z[k]);
    gf[k] = sigmoid(z[h + k]);
    go[k] = sigmoid(z[2 * h + k]);
    gg[k] = std::tanh(z[3 * h + k]);
    out.c[k] = gf[k] * c_prev[k] + gi[k] * gg[k];
    tc[k] = std::tanh(out.c[k]);
    out.h[k] = go[k] * tc[k];
  }
  if (cache != nullptr) {
    cache->x.assign(x.begin(), x.end());
    cache->h_prev.assign(h_prev.begin(), h_prev.end());
    cache->c_prev.assign(c_prev.begin(), c_prev.end());
    cache->i = std::move(gi);
    cache->f = std::move(gf);
    cache->o = std::move(go);
    cache->g = std::move(gg);
    cache->c = out.c;
    cache->tanh_c = std::move(tc);
  }
  return out;
}

void lstm_cell_backward(const LstmStepCache& cache, const LstmWeights& w,
                        std::span<const double> dh, std::span<const double> dc, LstmGrads& g,
                        std::span<double> dx, std::span<double> dh_prev,
                        std::span<double> dc_prev) {
  const std::size_t h = w.hidden();
  Vec dz(4 * h);
  for (std::size_t k = 0; k < h; ++k) {
    const double dct = dc[k] + dh[k] * cache.o[k] * (1.0 - cache.tanh_c[k] * cache.tanh_c[k]);
    const double di = dct * cache.g[k];
    const double df = dct * cache.c_prev[k];
    const double d_o = dh[k] * cache.tanh_c[k];
    const double dg = dct * cache.i[k];
    dz[k] = di * cache.i[k] * (1.0 - cache.i[k]);
    dz[h + k] = df * cache.f[k] * (1.0 - cache.f[k]);
    dz[2 * h + k] = d_o * cache.o[k] * (1.0 - cache.o[k]);
    dz[3 * h + k] = dg * (1.0 - cache.g[k] * cache.g[k]);
    if (!dc_prev.empty()) dc_prev[k] += dct * cache.f[k];
  }
  outer_add(g.wx, dz, cache.x);
  outer_add(g.wh, dz, cache.h_prev);
  axpy(1.0, dz, g.b.data());
  if (!dx.empty()) matvec_t_add(w.wx, dz, dx);
  if (!dh_prev.empty()) matvec_t_add(w.wh, dz, dh_prev);
}

GradCheckResult grad_check(ParamStore& store,
                           const std::function<double(ParamStore&, bool)>& f, double eps,
                           const std::vector<std::string>& only) {
  store.zero_grad();
  const double base = f(store, true);
  if (!std::isfinite(base)) throw std::domain_error("grad_check: objective is not finite");

  GradCheckResult result;
  const std::vector<std::string> names = only.empty() ? store.names() : only;
  for (const auto& name : names) {
    Tensor& value = store.value(name);
    const Tensor analytic = store.grad(name);
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double saved = value[i];
      value[i] = saved + eps;
      const double plus = f(store, false);
      value[i] = saved - eps;
      const double minus = f(store, false);
      value[i] = saved;
      if (!std::isfinite(plus) || !std::isfinite(minus)) {
        throw std::domain_error("grad_check: objective is not finite at " + name);
      }
      const double numeric = (plus - minus) / (2.0 * eps);
      const double err = std::abs(analytic[i] - numeric) / std::max(1.0, std::abs(numeric));
      if (err > result.max_rel_error || result.worst_param.empty()) {
        result = {err, name, i, analytic[i], numeric};
      }
    }
  }
  return result;
}

}  // namespace qasumm
