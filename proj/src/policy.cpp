#include "qasumm/policy.hpp"

#include <stdexcept>

namespace qasumm {

ExtractionPolicy::ExtractionPolicy(std::size_t doc_dim, std::size_t decision_hidden,
                                   double dropout)
    : doc_dim_(doc_dim), hidden_(decision_hidden), dropout_(dropout) {}

void ExtractionPolicy::add_params(ParamStore& store, Rng& rng) const {
  add_lstm_params(store, "policy.dec", doc_dim_ + 1, hidden_, rng);
  Tensor wh({1, doc_dim_ + hidden_});
  xavier_uniform(wh, rng);
  store.add("policy.wh", std::move(wh));
  store.add("policy.bh", Tensor({1}, 0.0));
}

namespace {

double logit(const Tensor& wh, const Tensor& bh, std::span<const double> h,
             std::span<const double> s_prev) {
  const std::size_t d = h.size();
  if (wh.cols() != d + s_prev.size()) {
    throw std::invalid_argument("policy: input width " + std::to_string(d + s_prev.size()) +
                                " does not match W^h width " + std::to_string(wh.cols()));
  }
  const auto row = wh.row(0);
  return dot(row.first(d), h) + dot(row.subspan(d), s_prev) + bh[0];
}

}  // namespace

double ExtractionPolicy::step_prob(const ParamStore& store, std::span<const double> h,
                                   std::span<const double> s_prev) const {
  return sigmoid(logit(store.value("policy.wh"), store.value("policy.bh"), h, s_prev));
}

SampledSummary ExtractionPolicy::run(const ParamStore& store, const EncodedSeq& doc,
                                     Decide decide, Rng* rng, bool use_dropout,
                                     std::span<const std::uint8_t> forced) const {
  const std::size_t n = doc.size();
  if (n == 0) throw std::invalid_argument("policy: empty document");
  if (doc.dim() != doc_dim_) throw std::invalid_argument("policy: document state width mismatch");
  if (decide == Decide::Forced && forced.size() != n) {
    throw std::invalid_argument("policy: forced mask length does not match the document");
  }
  const Tensor& wh = store.value("policy.wh");
  const Tensor& bh = store.value("policy.bh");
  const LstmWeights dec = lstm_weights(store, "policy.dec");
  const Dropout drop{use_dropout ? dropout_ : 0.0, use_dropout ? rng : nullptr};

  SampledSummary out;
  out.mask.resize(n);
  out.per_step_probs.resize(n);
  out.steps.resize(n);
  LstmState s{Vec(hidden_, 0.0), Vec(hidden_, 0.0)};
  for (std::size_t t = 0; t < n; ++t) {
    const Vec& h = doc.states[t];
    Vec prob_mask = drop.mask(doc_dim_);
    Vec h_in = apply_mask(h, prob_mask);
    const double z = logit(wh, bh, h_in, s.h);
    const double p = sigmoid(z);

    bool y = false;
    switch (decide) {
      case Decide::Sample: y = uniform01(*rng) < p; break;
      case Decide::Greedy: y = p > 0.5; break;
      case Decide::Forced: y = forced[t] != 0; break;
    }
    out.mask[t] = y ? 1 : 0;
    out.per_step_probs[t] = p;
    out.log_prob += y ? log_sigmoid(z) : log_sigmoid(-z);

    Vec x = h;
    x.push_back(y ? 1.0 : 0.0);
    Vec lstm_mask = drop.mask(doc_dim_ + 1);
    x = apply_mask(x, lstm_mask);

    out.state_inputs.push_back(std::move(h_in));
    out.prev_states.push_back(s.h);
    out.prob_masks.push_back(std::move(prob_mask));
    out.lstm_masks.push_back(std::move(lstm_mask));
    s = lstm_cell(x, s.h, s.c, dec, &out.steps[t]);
  }
  return out;
}

SampledSummary ExtractionPolicy::sample(const ParamStore& store, const EncodedSeq& doc, Rng& rng,
                                        bool training) const {
  return run(store, doc, Decide::Sample, &rng, training, {});
}

SampledSummary ExtractionPolicy::greedy(const ParamStore& store, const EncodedSeq& doc) const {
  return run(store, doc, Decide::Greedy, nullptr, false, {});
}

SampledSummary ExtractionPolicy::teacher_forced(const ParamStore& store, const EncodedSeq& doc,
                                                std::span<const std::uint8_t> mask,
                                                Rng* dropout_rng) const {
  return run(store, doc, Decide::Forced, dropout_rng, dropout_rng != nullptr, mask);
}

void ExtractionPolicy::backward(ParamStore& store, const SampledSummary& summary, double scale,
                                std::vector<Vec>& d_doc_states) const {
  const std::size_t n = summary.mask.size();
  if (d_doc_states.size() != n) throw std::invalid_argument("policy: state gradient length mismatch");
  const Tensor& wh = store.value("policy.wh");
  Tensor& d_wh = store.grad("policy.wh");
  Tensor& d_bh = store.grad("policy.bh");
  const LstmWeights dec = lstm_weights(store, "policy.dec");
  LstmGrads d_dec = lstm_grads(store, "policy.dec");
  const auto wh_row = wh.row(0);

  Vec ds(hidden_, 0.0), dc(hidden_, 0.0);
  for (std::size_t t = n; t-- > 0;) {
    Vec ds_prev(hidden_, 0.0), dc_prev(hidden_, 0.0);

    // s_t = LSTM(x_t, s_{t-1})
    Vec dx(doc_dim_ + 1, 0.0);
    lstm_cell_backward(summary.steps[t], dec, ds, dc, d_dec, dx, ds_prev, dc_prev);
    const Vec& lm = summary.lstm_masks[t];
    for (std::size_t i = 0; i < doc_dim_; ++i) {
      d_doc_states[t][i] += lm.empty() ? dx[i] : dx[i] * lm[i];
    }

    // p_t = sigmoid(z_t); d log Bernoulli(y_t; p_t) / d z_t = y_t - p_t
    const double y = summary.mask[t] != 0 ? 1.0 : 0.0;
    const double dz = scale * (y - summary.per_step_probs[t]);
    if (dz != 0.0) {
      auto d_row = d_wh.row(0);
      axpy(dz, summary.state_inputs[t], d_row.first(doc_dim_));
      axpy(dz, summary.prev_states[t], d_row.subspan(doc_dim_));
      d_bh[0] += dz;
      const Vec& pm = summary.prob_masks[t];
      for (std::size_t i = 0; i < doc_dim_; ++i) {
        d_doc_states[t][i] += dz * wh_row[i] * (pm.empty() ? 1.0 : pm[i]);
      }
      axpy(dz, wh_row.subspan(doc_dim_), ds_prev);
    }
    ds = std::move(ds_prev);
    dc = std::move(dc_prev);
  }
}

SummaryMask greedy_decode(const ExtractionPolicy& policy, const ParamStore& store,
                          const EncodedSeq& doc) {
  return policy.greedy(store, doc).mask;
}

}  // namespace qasumm
