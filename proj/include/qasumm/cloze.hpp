#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qasumm/corpus.hpp"
#include "qasumm/numerics.hpp"

namespace qasumm {

enum class AnswerMode { Entity, Keyword };

std::string_view to_string(AnswerMode mode);
AnswerMode parse_answer_mode(std::string_view text);

// Categorical answer space of the reader. Index 0 is reserved for answers
// that were never seen while building the vocabulary.
class AnswerVocab {
 public:
  static constexpr int kUnseen = 0;
  static constexpr std::string_view kUnseenToken = "<unseen>";

  AnswerVocab();
  // Rebuilds from a saved list; the first entry must be the reserved token.
  explicit AnswerVocab(std::vector<std::string> tokens);

  int index(std::string_view answer) const;
  const std::string& token(int index) const { return tokens_.at(static_cast<std::size_t>(index)); }
  std::size_t size() const { return tokens_.size(); }
  std::size_t unique_answers() const { return tokens_.size() - 1; }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

struct QAPair {
  std::vector<std::string> question_tokens;  // exactly one Vocabulary::kBlankToken
  std::string answer_token;
  int answer_index = AnswerVocab::kUnseen;
  std::size_t origin_sentence = 0;
  std::size_t blank_position = 0;
};

// Per-document generator seed: global seed XOR document index.
inline std::uint64_t document_seed(std::uint64_t seed, std::size_t doc_index) {
  return seed ^ static_cast<std::uint64_t>(doc_index);
}

// Returns exactly k pairs. Sentence j of the abstract yields one pair; when
// the abstract has fewer than k sentences the pairs are repeated cyclically
// starting from the top sentence, when it has more only the first k are used.
//
// Entity mode blanks one entity span drawn uniformly from the sentence's
// spans (multi-token spans collapse into one underscore-joined answer) and
// falls back to the root token when the sentence has no entities. Keyword
// mode always blanks the root token.
std::vector<QAPair> make_qa_pairs(const Document& doc, AnswerMode mode, std::size_t k, Rng& rng);

// Sets answer_index on each pair; unknown answers get AnswerVocab::kUnseen.
void assign_answers(std::span<QAPair> pairs, const AnswerVocab& vocab);

// Union of the answers produced by make_qa_pairs over `train`, using
// document_seed(seed, i) for the i-th document.
AnswerVocab build_answer_vocab(std::span<const Document> train, AnswerMode mode, std::size_t k,
                               std::uint64_t seed);

// --- heuristic annotation --------------------------------------------------
//
// Used only by `prep` for text that arrives without NER/parse annotations.
// Works on original-casing tokens.

struct SentenceAnnotation {
  std::vector<EntitySpan> entities;
  std::size_t root = 0;
};

SentenceAnnotation annotate_sentence(std::span<const std::string> tokens);

}  // namespace qasumm
