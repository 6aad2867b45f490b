#include "qasumm/encoders.hpp"

#include <stdexcept>

namespace qasumm {

Vec Dropout::mask(std::size_t n) const {
  if (!active()) return {};
  Vec m(n);
  const double keep = 1.0 - rate;
  for (double& x : m) x = uniform01(*rng) < rate ? 0.0 : 1.0 / keep;
  return m;
}

Vec apply_mask(std::span<const double> x, const Vec& mask) {
  Vec out(x.begin(), x.end());
  if (mask.empty()) return out;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return out;
}

QuestionVec EncodedSeq::question() const {
  if (states.empty()) throw std::logic_error("question vector of empty sequence");
  const Vec& last = states.back();
  const Vec& first = states.front();
  QuestionVec out;
  out.q.assign(last.begin(), last.begin() + static_cast<long>(hidden));
  out.q.insert(out.q.end(), first.begin() + static_cast<long>(hidden), first.end());
  return out;
}

BiLstmEncoder::BiLstmEncoder(std::string prefix, std::string embedding, std::size_t input_dim,
                             std::size_t hidden)
    : prefix_(std::move(prefix)),
      embedding_(std::move(embedding)),
      input_dim_(input_dim),
      hidden_(hidden) {}

void BiLstmEncoder::add_params(ParamStore& store, Rng& rng) const {
  add_lstm_params(store, prefix_ + ".fwd", input_dim_, hidden_, rng);
  add_lstm_params(store, prefix_ + ".bwd", input_dim_, hidden_, rng);
}

EncodedSeq BiLstmEncoder::encode(const ParamStore& store, std::span<const int> tokens,
                                 const Dropout& dropout) const {
  if (tokens.empty()) throw std::invalid_argument("cannot encode an empty sequence");
  const Tensor& embed = store.value(embedding_);
  if (embed.cols() != input_dim_) throw std::invalid_argument("embedding width mismatch");
  const LstmWeights fwd = lstm_weights(store, prefix_ + ".fwd");
  const LstmWeights bwd = lstm_weights(store, prefix_ + ".bwd");
  const std::size_t n = tokens.size();

  EncodedSeq seq;
  seq.hidden = hidden_;
  seq.tokens.assign(tokens.begin(), tokens.end());
  seq.states.assign(n, Vec(2 * hidden_, 0.0));
  seq.fwd_steps.resize(n);
  seq.bwd_steps.resize(n);
  if (dropout.active()) {
    for (std::size_t t = 0; t < n; ++t) seq.fwd_masks.push_back(dropout.mask(input_dim_));
    for (std::size_t t = 0; t < n; ++t) seq.bwd_masks.push_back(dropout.mask(input_dim_));
  }
  auto row = [&](int token) {
    if (token < 0 || static_cast<std::size_t>(token) >= embed.rows()) {
      throw std::out_of_range("token index " + std::to_string(token) + " outside embedding table");
    }
    return embed.row(static_cast<std::size_t>(token));
  };

  LstmState state{Vec(hidden_, 0.0), Vec(hidden_, 0.0)};
  for (std::size_t t = 0; t < n; ++t) {
    const Vec x = apply_mask(row(tokens[t]), seq.fwd_masks.empty() ? Vec{} : seq.fwd_masks[t]);
    state = lstm_cell(x, state.h, state.c, fwd, &seq.fwd_steps[t]);
    std::copy(state.h.begin(), state.h.end(), seq.states[t].begin());
  }
  state = {Vec(hidden_, 0.0), Vec(hidden_, 0.0)};
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t t = n - 1 - j;
    const Vec x = apply_mask(row(tokens[t]), seq.bwd_masks.empty() ? Vec{} : seq.bwd_masks[j]);
    state = lstm_cell(x, state.h, state.c, bwd, &seq.bwd_steps[j]);
    std::copy(state.h.begin(), state.h.end(), seq.states[t].begin() + static_cast<long>(hidden_));
  }
  return seq;
}

QuestionVec BiLstmEncoder::encode_question(const ParamStore& store,
                                           std::span<const int> tokens) const {
  return encode(store, tokens).question();
}

void BiLstmEncoder::add_question_grad(const EncodedSeq& seq, std::span<const double> dq,
                                      std::vector<Vec>& d_states) {
  const std::size_t h = seq.hidden;
  for (std::size_t k = 0; k < h; ++k) {
    d_states.back()[k] += dq[k];
    d_states.front()[h + k] += dq[h + k];
  }
}

void BiLstmEncoder::backward(ParamStore& store, const EncodedSeq& seq,
                             std::span<const Vec> d_states) const {
  const std::size_t n = seq.size();
  if (d_states.size() != n) throw std::invalid_argument("state gradient length mismatch");
  const std::size_t h = hidden_;
  Tensor& d_embed = store.grad(embedding_);

  auto run = [&](const std::string& dir, const std::vector<LstmStepCache>& steps,
                 const std::vector<Vec>& masks, bool reverse) {
    const LstmWeights w = lstm_weights(store, dir);
    LstmGrads g = lstm_grads(store, dir);
    Vec dh_next(h, 0.0), dc_next(h, 0.0);
    for (std::size_t j = n; j-- > 0;) {
      const std::size_t t = reverse ? n - 1 - j : j;
      Vec dh = dh_next;
      const std::size_t offset = reverse ? h : 0;
      for (std::size_t k = 0; k < h; ++k) dh[k] += d_states[t][offset + k];
      Vec dx(input_dim_, 0.0), dh_prev(h, 0.0), dc_prev(h, 0.0);
      lstm_cell_backward(steps[j], w, dh, dc_next, g, dx, dh_prev, dc_prev);
      if (!masks.empty()) {
        for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= masks[j][i];
      }
      axpy(1.0, dx, d_embed.row(static_cast<std::size_t>(seq.tokens[t])));
      dh_next = std::move(dh_prev);
      dc_next = std::move(dc_prev);
    }
  };
  run(prefix_ + ".fwd", seq.fwd_steps, seq.fwd_masks, false);
  run(prefix_ + ".bwd", seq.bwd_steps, seq.bwd_masks, true);
}

}  // namespace qasumm
