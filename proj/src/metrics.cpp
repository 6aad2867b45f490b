#include "qasumm/metrics.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "qasumm/cloze.hpp"

namespace qasumm {

RougeScore make_rouge(double overlap, double candidate_total, double reference_total) {
  RougeScore s;
  s.precision = candidate_total > 0 ? overlap / candidate_total : 0.0;
  s.recall = reference_total > 0 ? overlap / reference_total : 0.0;
  const double sum = s.precision + s.recall;
  s.f1 = sum > 0 ? 2.0 * s.precision * s.recall / sum : 0.0;
  return s;
}

namespace {

std::map<std::vector<std::string>, std::size_t> ngram_counts(std::span<const std::string> tokens,
                                                             std::size_t n) {
  std::map<std::vector<std::string>, std::size_t> out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++out[std::vector<std::string>(tokens.begin() + static_cast<long>(i),
                                   tokens.begin() + static_cast<long>(i + n))];
  }
  return out;
}

}  // namespace

RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference,
                   int n) {
  if (n != 1 && n != 2) throw std::invalid_argument("rouge_n supports n = 1 or 2");
  const auto cand = ngram_counts(candidate, static_cast<std::size_t>(n));
  const auto ref = ngram_counts(reference, static_cast<std::size_t>(n));
  std::size_t overlap = 0, cand_total = 0, ref_total = 0;
  for (const auto& [g, c] : cand) cand_total += c;
  for (const auto& [g, c] : ref) {
    ref_total += c;
    auto it = cand.find(g);
    if (it != cand.end()) overlap += std::min(c, it->second);
  }
  return make_rouge(static_cast<double>(overlap), static_cast<double>(cand_total),
                    static_cast<double>(ref_total));
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference) {
  return make_rouge(static_cast<double>(lcs_length(candidate, reference)),
                    static_cast<double>(candidate.size()), static_cast<double>(reference.size()));
}

RougeTriple rouge_all(std::span<const std::string> candidate,
                      std::span<const std::vector<std::string>> references) {
  RougeTriple best;
  for (const auto& ref : references) {
    const RougeScore r1 = rouge_n(candidate, ref, 1);
    const RougeScore r2 = rouge_n(candidate, ref, 2);
    const RougeScore rl = rouge_l(candidate, ref);
    if (r1.f1 > best.r1.f1) best.r1 = r1;
    if (r2.f1 > best.r2.f1) best.r2 = r2;
    if (rl.f1 > best.rl.f1) best.rl = rl;
  }
  return best;
}

double accuracy(std::span<const int> predicted, std::span<const int> gold) {
  if (predicted.size() != gold.size()) throw std::invalid_argument("accuracy: size mismatch");
  if (gold.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] != AnswerVocab::kUnseen && predicted[i] == gold[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(gold.size());
}

namespace {

std::vector<std::string> flatten(std::span<const std::vector<std::string>> sentences) {
  std::vector<std::string> out;
  for (const auto& s : sentences) out.insert(out.end(), s.begin(), s.end());
  return out;
}

}  // namespace

EvalReport evaluate(const SummarizationModel& model, std::span<const Example> docs) {
  EvalReport report;
  std::size_t correct = 0, questions = 0;
  for (const Example& ex : docs) {
    DocumentReport doc;
    doc.id = ex.doc.id;
    const EncodedSeq enc = model.encode_document(ex.source_ids);
    doc.mask = greedy_decode(model.policy(), model.params(), enc);
    const auto summary = select<std::string>(ex.doc.source_tokens, doc.mask);
    const std::vector<std::vector<std::string>> refs{flatten(ex.doc.abstract_sentences)};
    doc.rouge = rouge_all(summary, refs);

    const auto ids = select<int>(ex.source_ids, doc.mask);
    const auto predicted = model.reader().predict(model.params(), ids, ex.questions);
    for (std::size_t q = 0; q < ex.questions.size(); ++q) {
      const int gold = ex.questions[q].answer;
      if (gold != AnswerVocab::kUnseen && predicted[q] == gold) ++doc.correct;
    }
    doc.questions = ex.questions.size();
    correct += doc.correct;
    questions += doc.questions;

    auto add = [](RougeScore& acc, const RougeScore& s) {
      acc.precision += s.precision;
      acc.recall += s.recall;
      acc.f1 += s.f1;
    };
    add(report.mean.r1, doc.rouge.r1);
    add(report.mean.r2, doc.rouge.r2);
    add(report.mean.rl, doc.rouge.rl);
    report.documents.push_back(std::move(doc));
  }
  if (!docs.empty()) {
    const double n = static_cast<double>(docs.size());
    for (RougeScore* s : {&report.mean.r1, &report.mean.r2, &report.mean.rl}) {
      s->precision /= n;
      s->recall /= n;
      s->f1 /= n;
    }
  }
  report.qa_accuracy = questions > 0 ? static_cast<double>(correct) / static_cast<double>(questions) : 0.0;
  return report;
}

double qa_accuracy(const SummarizationModel& model, std::span<const Example> docs) {
  return evaluate(model, docs).qa_accuracy;
}

}  // namespace qasumm
