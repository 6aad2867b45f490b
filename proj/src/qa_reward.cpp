#include "qasumm/qa_reward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qasumm {

Attention attend(std::span<const double> q, std::span<const Vec> states, const Tensor& wa) {
  if (states.empty()) throw std::invalid_argument("attention over an empty summary");
  // score_i = q^T W^a h_i = (W^a^T q) . h_i
  Vec u(wa.cols(), 0.0);
  matvec_t_add(wa, q, u);
  Attention out;
  out.scores.reserve(states.size());
  for (const Vec& h : states) out.scores.push_back(dot(u, h));
  out.alpha = softmax(out.scores);
  out.context.assign(states.front().size(), 0.0);
  for (std::size_t i = 0; i < states.size(); ++i) axpy(out.alpha[i], states[i], out.context);
  return out;
}

double answer_logprob(std::span<const double> context, const Tensor& wc, int gold) {
  if (gold < 0 || static_cast<std::size_t>(gold) >= wc.rows()) {
    throw std::out_of_range("answer index " + std::to_string(gold) + " out of range");
  }
  return log_softmax(matvec(wc, context))[static_cast<std::size_t>(gold)];
}

QaReader::QaReader(BiLstmEncoder encoder, std::size_t answer_count)
    : encoder_(std::move(encoder)), answer_count_(answer_count) {}

void QaReader::add_params(ParamStore& store, Rng& rng) const {
  const std::size_t d = encoder_.output_dim();
  Tensor wa({d, d});
  Tensor wc({answer_count_, d});
  xavier_uniform(wa, rng);
  xavier_uniform(wc, rng);
  store.add("qa.wa", std::move(wa));
  store.add("qa.wc", std::move(wc));
}

QaTrace QaReader::forward(const ParamStore& store, std::span<const int> summary,
                          std::span<const QaQuestion> questions) const {
  QaTrace trace;
  if (questions.empty()) return trace;
  const Tensor& wa = store.value("qa.wa");
  const Tensor& wc = store.value("qa.wc");
  if (summary.empty()) {
    trace.empty_summary = true;
    trace.reward = -std::log(static_cast<double>(wc.rows()));
    return trace;
  }
  trace.summary = encoder_.encode(store, summary);
  double total = 0.0;
  for (const QaQuestion& question : questions) {
    if (question.answer < 0 || static_cast<std::size_t>(question.answer) >= wc.rows()) {
      throw std::out_of_range("answer index " + std::to_string(question.answer) + " out of range");
    }
    QaTrace::Question qt;
    qt.encoded = encoder_.encode(store, question.tokens);
    qt.q = qt.encoded.question();
    qt.attention = attend(qt.q.q, trace.summary.states, wa);
    const Vec logits = matvec(wc, qt.attention.context);
    const Vec logp = log_softmax(logits);
    qt.probs.resize(logp.size());
    for (std::size_t a = 0; a < logp.size(); ++a) qt.probs[a] = std::exp(logp[a]);
    qt.gold = question.answer;
    qt.log_prob = logp[static_cast<std::size_t>(question.answer)];
    total += qt.log_prob;
    trace.questions.push_back(std::move(qt));
  }
  trace.reward = total / static_cast<double>(questions.size());
  return trace;
}

void QaReader::backward(ParamStore& store, const QaTrace& trace, double scale) const {
  if (trace.empty_summary || trace.questions.empty() || scale == 0.0) return;
  const Tensor& wa = store.value("qa.wa");
  const Tensor& wc = store.value("qa.wc");
  Tensor& d_wa = store.grad("qa.wa");
  Tensor& d_wc = store.grad("qa.wc");
  const double w = scale / static_cast<double>(trace.questions.size());
  const std::size_t d = encoder_.output_dim();
  const auto& states = trace.summary.states;

  std::vector<Vec> d_summary(states.size(), Vec(d, 0.0));
  for (const auto& qt : trace.questions) {
    // d log p[gold] / d logits = onehot(gold) - p
    Vec d_logits(qt.probs.size());
    for (std::size_t a = 0; a < d_logits.size(); ++a) d_logits[a] = -w * qt.probs[a];
    d_logits[static_cast<std::size_t>(qt.gold)] += w;
    outer_add(d_wc, d_logits, qt.attention.context);
    Vec d_context(d, 0.0);
    matvec_t_add(wc, d_logits, d_context);

    const Vec& alpha = qt.attention.alpha;
    Vec d_alpha(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
      d_alpha[i] = dot(d_context, states[i]);
      axpy(alpha[i], d_context, d_summary[i]);
    }
    const double mean = dot(alpha, d_alpha);
    Vec u(d, 0.0);
    matvec_t_add(wa, qt.q.q, u);
    Vec du(d, 0.0);
    for (std::size_t i = 0; i < states.size(); ++i) {
      const double d_score = alpha[i] * (d_alpha[i] - mean);
      axpy(d_score, u, d_summary[i]);
      axpy(d_score, states[i], du);
    }
    outer_add(d_wa, qt.q.q, du);
    const Vec dq = matvec(wa, du);
    std::vector<Vec> d_question(qt.encoded.size(), Vec(d, 0.0));
    BiLstmEncoder::add_question_grad(qt.encoded, dq, d_question);
    encoder_.backward(store, qt.encoded, d_question);
  }
  encoder_.backward(store, trace.summary, d_summary);
}

std::vector<int> QaReader::predict(const ParamStore& store, std::span<const int> summary,
                                   std::span<const QaQuestion> questions) const {
  std::vector<int> out;
  const QaTrace trace = forward(store, summary, questions);
  // Uniform scores: argmax is the first (reserved) answer, which never matches.
  if (trace.empty_summary) return std::vector<int>(questions.size(), 0);
  for (const auto& qt : trace.questions) {
    out.push_back(static_cast<int>(std::max_element(qt.probs.begin(), qt.probs.end()) -
                                   qt.probs.begin()));
  }
  return out;
}

}  // namespace qasumm
