#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>

#include "qasumm/tensor.hpp"

namespace qasumm {

using Rng = std::mt19937_64;

// Derives an independent stream seed from a base seed and a list of keys.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys);

double uniform01(Rng& rng);

double sigmoid(double x);
// log(sigmoid(x)) without overflow for large |x|.
double log_sigmoid(double x);

/// Numerically stable softmax (max-subtracted). Throws on empty input.
Vec softmax(std::span<const double> v);
/// log softmax, same stability guarantees as softmax().
Vec log_softmax(std::span<const double> v);

double dot(std::span<const double> a, std::span<const double> b);
// y = W x
Vec matvec(const Tensor& w, std::span<const double> x);
// y += W^T x
void matvec_t_add(const Tensor& w, std::span<const double> x, std::span<double> y);
// G += scale * a b^T
void outer_add(Tensor& g, std::span<const double> a, std::span<const double> b, double scale = 1.0);
void axpy(double a, std::span<const double> x, std::span<double> y);
Vec concat(std::span<const double> a, std::span<const double> b);

// Xavier-uniform fill for a 2-D weight matrix.
void xavier_uniform(Tensor& w, Rng& rng);
void uniform_fill(Tensor& t, double lo, double hi, Rng& rng);

// --- LSTM cell -------------------------------------------------------------
//
// Gate rows are laid out [input; forget; output; candidate], each `hidden`
// rows tall. Weights: wx (4H x I), wh (4H x H), b (4H).

struct LstmWeights {
  const Tensor& wx;
  const Tensor& wh;
  const Tensor& b;

  std::size_t hidden() const { return b.size() / 4; }
  std::size_t input() const { return wx.cols(); }
};

struct LstmGrads {
  Tensor& wx;
  Tensor& wh;
  Tensor& b;
};

struct LstmState {
  Vec h;
  Vec c;
};

struct LstmStepCache {
  Vec x, h_prev, c_prev;
  Vec i, f, o, g;
  Vec c, tanh_c;
};

// Creates `<prefix>.wx`, `<prefix>.wh`, `<prefix>.b` in the store.
void add_lstm_params(ParamStore& store, const std::string& prefix, std::size_t input,
                     std::size_t hidden, Rng& rng);
LstmWeights lstm_weights(const ParamStore& store, const std::string& prefix);
LstmGrads lstm_grads(ParamStore& store, const std::string& prefix);

LstmState lstm_cell(std::span<const double> x, std::span<const double> h_prev,
                    std::span<const double> c_prev, const LstmWeights& w,
                    LstmStepCache* cache = nullptr);

// Backward through one step. dh/dc are the gradients flowing into h and c;
// parameter gradients are accumulated into `g` and input/state gradients are
// added to dx, dh_prev, dc_prev (any of which may be empty to discard).
void lstm_cell_backward(const LstmStepCache& cache, const LstmWeights& w,
                        std::span<const double> dh, std::span<const double> dc, LstmGrads& g,
                        std::span<double> dx, std::span<double> dh_prev,
                        std::span<double> dc_prev);

// --- gradient checking -----------------------------------------------------

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

// `f(store, accumulate)` must return the objective; when `accumulate` is true
// it must also add the analytic gradient into store.grad(). Perturbs every
// entry of every parameter (or only those listed in `only`) and compares with
// central differences: |a - n| / max(1, |n|).
GradCheckResult grad_check(ParamStore& store,
                           const std::function<double(ParamStore&, bool)>& f, double eps = 1e-5,
                           const std::vector<std::string>& only = {});

}  // namespace qasumm
