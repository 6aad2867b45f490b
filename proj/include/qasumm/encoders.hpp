#pragma once

#include <span>
#include <string>
#include <vector>

#include "qasumm/numerics.hpp"

namespace qasumm {

// Inverted dropout. Active only when a generator is supplied and rate > 0.
struct Dropout {
  double rate = 0.0;
  Rng* rng = nullptr;

  bool active() const { return rng != nullptr && rate > 0.0; }
  // Returns an empty mask when inactive.
  Vec mask(std::size_t n) const;
};

Vec apply_mask(std::span<const double> x, const Vec& mask);

struct QuestionVec {
  Vec q;
};

// Per-token states of a bidirectional pass plus the tape needed for backward.
struct EncodedSeq {
  std::vector<Vec> states;  // states[t] = [forward_t || backward_t]
  std::size_t hidden = 0;

  std::vector<int> tokens;
  std::vector<Vec> fwd_masks, bwd_masks;
  std::vector<LstmStepCache> fwd_steps;
  std::vector<LstmStepCache> bwd_steps;  // bwd_steps[j] consumed token T-1-j

  std::size_t dim() const { return 2 * hidden; }
  std::size_t size() const { return states.size(); }
  // [last forward output || last backward output]; the backward pass ends at token 0.
  QuestionVec question() const;
};

// Embedding lookup followed by forward and backward LSTMs. Parameters live
// under `<prefix>.fwd.*` and `<prefix>.bwd.*`; the embedding table is shared
// and named by `embedding`.
class BiLstmEncoder {
 public:
  BiLstmEncoder(std::string prefix, std::string embedding, std::size_t input_dim,
                std::size_t hidden);

  void add_params(ParamStore& store, Rng& rng) const;

  EncodedSeq encode(const ParamStore& store, std::span<const int> tokens,
                    const Dropout& dropout = {}) const;
  QuestionVec encode_question(const ParamStore& store, std::span<const int> tokens) const;

  // Accumulates d(objective)/d(params) given d(objective)/d(states).
  void backward(ParamStore& store, const EncodedSeq& seq, std::span<const Vec> d_states) const;
  // Convenience: routes a gradient on question() back into the states.
  static void add_question_grad(const EncodedSeq& seq, std::span<const double> dq,
                                std::vector<Vec>& d_states);

  std::size_t hidden() const { return hidden_; }
  std::size_t output_dim() const { return 2 * hidden_; }
  const std::string& prefix() const { return prefix_; }

 private:
  std::string prefix_;
  std::string embedding_;
  std::size_t input_dim_;
  std::size_t hidden_;
};

}  // namespace qasumm
