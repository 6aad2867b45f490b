#pragma once

#include <span>
#include <vector>

#include "qasumm/encoders.hpp"

namespace qasumm {

struct Attention {
  Vec scores;   // q W^a h_i
  Vec alpha;    // softmax(scores)
  Vec context;  // sum_i alpha_i h_i
};

// Bilinear attention of a question vector over summary states.
Attention attend(std::span<const double> q, std::span<const Vec> states, const Tensor& wa);

// log softmax(W^c c)[gold]. Throws std::out_of_range for a bad gold index.
double answer_logprob(std::span<const double> context, const Tensor& wc, int gold);

// A Cloze question already mapped to vocabulary and answer indices.
struct QaQuestion {
  std::vector<int> tokens;
  int answer = 0;
};

struct QaTrace {
  struct Question {
    EncodedSeq encoded;
    QuestionVec q;
    Attention attention;
    Vec probs;
    double log_prob = 0.0;
    int gold = 0;
  };

  double reward = 0.0;  // mean log-likelihood of the gold answers
  bool empty_summary = false;
  EncodedSeq summary;
  std::vector<Question> questions;
};

// The question-answering reward model. Questions and summaries share one
// bidirectional encoder; parameters `qa.wa` (d x d) and `qa.wc` (A x d).
class QaReader {
 public:
  QaReader(BiLstmEncoder encoder, std::size_t answer_count);

  void add_params(ParamStore& store, Rng& rng) const;

  // An empty summary has no states to attend over; every question then
  // scores -ln(A), the log-likelihood of a uniform guess.
  QaTrace forward(const ParamStore& store, std::span<const int> summary,
                  std::span<const QaQuestion> questions) const;
  double reward(const ParamStore& store, std::span<const int> summary,
                std::span<const QaQuestion> questions) const {
    return forward(store, summary, questions).reward;
  }
  // Accumulates scale * d(reward)/d(params).
  void backward(ParamStore& store, const QaTrace& trace, double scale) const;

  // Argmax answer per question.
  std::vector<int> predict(const ParamStore& store, std::span<const int> summary,
                           std::span<const QaQuestion> questions) const;

  const BiLstmEncoder& encoder() const { return encoder_; }
  std::size_t answer_count() const { return answer_count_; }

 private:
  BiLstmEncoder encoder_;
  std::size_t answer_count_;
};

}  // namespace qasumm
