#pragma once

#include <span>
#include <string>
#include <vector>

#include "qasumm/model.hpp"

namespace qasumm {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

RougeScore make_rouge(double overlap, double candidate_total, double reference_total);

// Clipped n-gram overlap, full length (no truncation, stemming or stopwords).
RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference,
                   int n);
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);
RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference);

struct RougeTriple {
  RougeScore r1, r2, rl;
};

// Best F1 per metric over several references.
RougeTriple rouge_all(std::span<const std::string> candidate,
                      std::span<const std::vector<std::string>> references);

// Fraction of (prediction, gold) pairs that agree; gold answers mapped to
// the reserved unseen index always count as wrong.
double accuracy(std::span<const int> predicted, std::span<const int> gold);

// Greedy-decodes each document and answers its questions from the summary.
double qa_accuracy(const SummarizationModel& model, std::span<const Example> docs);

struct DocumentReport {
  std::string id;
  RougeTriple rouge;
  std::size_t correct = 0;
  std::size_t questions = 0;
  SummaryMask mask;
};

struct EvalReport {
  std::vector<DocumentReport> documents;
  RougeTriple mean;
  double qa_accuracy = 0.0;
};

EvalReport evaluate(const SummarizationModel& model, std::span<const Example> docs);

}  // namespace qasumm
