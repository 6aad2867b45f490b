#pragma once

#include <span>
#include <vector>

#include "qasumm/encoders.hpp"
#include "qasumm/summary_mask.hpp"

namespace qasumm {

// A summary drawn (or scored) by the policy, with the tape for backward.
struct SampledSummary {
  SummaryMask mask;
  double log_prob = 0.0;
  Vec per_step_probs;

  std::vector<Vec> state_inputs;  // dropped-out h_t fed to the probability layer
  std::vector<Vec> prev_states;   // s_{t-1} at step t
  std::vector<Vec> prob_masks;    // dropout on h_t before the probability layer
  std::vector<Vec> lstm_masks;    // dropout on [h_t || y_t] before the decision LSTM
  std::vector<LstmStepCache> steps;
};

// Word-level extraction policy: p_t = sigmoid(W^h [h_t || s_{t-1}] + b^h)
// with s_t = LSTM([h_t || y_t], s_{t-1}) tracking earlier decisions.
// Parameters: `policy.dec.*` (decision LSTM), `policy.wh`, `policy.bh`.
class ExtractionPolicy {
 public:
  ExtractionPolicy(std::size_t doc_dim, std::size_t decision_hidden, double dropout);

  void add_params(ParamStore& store, Rng& rng) const;

  double step_prob(const ParamStore& store, std::span<const double> h,
                   std::span<const double> s_prev) const;

  // Draws y_t ~ Bernoulli(p_t) step by step. Dropout applies only when training.
  SampledSummary sample(const ParamStore& store, const EncodedSeq& doc, Rng& rng,
                        bool training) const;
  // y_t = 1 iff p_t > 0.5; no dropout.
  SampledSummary greedy(const ParamStore& store, const EncodedSeq& doc) const;
  // Scores a given mask. Dropout is applied when `dropout_rng` is non-null.
  SampledSummary teacher_forced(const ParamStore& store, const EncodedSeq& doc,
                                std::span<const std::uint8_t> mask,
                                Rng* dropout_rng = nullptr) const;

  // Accumulates scale * d(log P(mask|X))/d(policy params) into the store and
  // scale * d(log P)/d(h_t) into d_doc_states.
  void backward(ParamStore& store, const SampledSummary& summary, double scale,
                std::vector<Vec>& d_doc_states) const;

  std::size_t doc_dim() const { return doc_dim_; }
  std::size_t decision_hidden() const { return hidden_; }
  double dropout() const { return dropout_; }

 private:
  enum class Decide { Sample, Greedy, Forced };
  SampledSummary run(const ParamStore& store, const EncodedSeq& doc, Decide decide, Rng* rng,
                     bool use_dropout, std::span<const std::uint8_t> forced) const;

  std::size_t doc_dim_;
  std::size_t hidden_;
  double dropout_;
};

SummaryMask greedy_decode(const ExtractionPolicy& policy, const ParamStore& store,
                          const EncodedSeq& doc);

}  // namespace qasumm
