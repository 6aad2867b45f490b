#include "qasumm/cloze.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <random>
#include <set>

namespace qasumm {

std::string_view to_string(AnswerMode mode) {
  return mode == AnswerMode::Entity ? "entity" : "keyword";
}

AnswerMode parse_answer_mode(std::string_view text) {
  if (text == "entity") return AnswerMode::Entity;
  if (text == "keyword") return AnswerMode::Keyword;
  throw std::invalid_argument("unknown question mode '" + std::string(text) +
                              "' (expected entity or keyword)");
}

AnswerVocab::AnswerVocab() : AnswerVocab(std::vector<std::string>{std::string(kUnseenToken)}) {}

AnswerVocab::AnswerVocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_[kUnseen] != kUnseenToken) {
    throw DataError("answer vocabulary must start with the reserved token");
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<int>(i)).second) {
      throw DataError("duplicate answer '" + tokens_[i] + "'");
    }
  }
}

int AnswerVocab::index(std::string_view answer) const {
  auto it = index_.find(std::string(answer));
  return it == index_.end() ? kUnseen : it->second;
}

namespace {

QAPair blank_span(const std::vector<std::string>& sentence, std::size_t start, std::size_t end,
                  std::size_t origin) {
  QAPair pair;
  pair.origin_sentence = origin;
  pair.blank_position = start;
  for (std::size_t i = start; i < end; ++i) {
    if (i > start) pair.answer_token += '_';
    pair.answer_token += sentence[i];
  }
  pair.question_tokens.assign(sentence.begin(), sentence.begin() + static_cast<long>(start));
  pair.question_tokens.emplace_back(Vocabulary::kBlankToken);
  pair.question_tokens.insert(pair.question_tokens.end(),
                              sentence.begin() + static_cast<long>(end), sentence.end());
  return pair;
}

}  // namespace

std::vector<QAPair> make_qa_pairs(const Document& doc, AnswerMode mode, std::size_t k, Rng& rng) {
  if (doc.abstract_sentences.empty() || k == 0) return {};
  const std::size_t distinct = std::min(k, doc.abstract_sentences.size());

  std::vector<QAPair> unique;
  unique.reserve(distinct);
  for (std::size_t s = 0; s < distinct; ++s) {
    const auto& sentence = doc.abstract_sentences[s];
    const auto& spans = doc.entity_spans[s];
    if (mode == AnswerMode::Entity && !spans.empty()) {
      std::size_t pick = 0;
      if (spans.size() > 1) {
        pick = std::uniform_int_distribution<std::size_t>(0, spans.size() - 1)(rng);
      }
      unique.push_back(blank_span(sentence, spans[pick].start, spans[pick].end, s));
    } else {
      const std::size_t root = doc.root_index[s];
      unique.push_back(blank_span(sentence, root, root + 1, s));
    }
  }

  std::vector<QAPair> pairs;
  pairs.reserve(k);
  for (std::size_t i = 0; i < k; ++i) pairs.push_back(unique[i % distinct]);
  return pairs;
}

void assign_answers(std::span<QAPair> pairs, const AnswerVocab& vocab) {
  for (QAPair& p : pairs) p.answer_index = vocab.index(p.answer_token);
}

AnswerVocab build_answer_vocab(std::span<const Document> train, AnswerMode mode, std::size_t k,
                               std::uint64_t seed) {
  std::set<std::string> answers;
  for (std::size_t i = 0; i < train.size(); ++i) {
    Rng rng(document_seed(seed, i));
    for (const QAPair& p : make_qa_pairs(train[i], mode, k, rng)) answers.insert(p.answer_token);
  }
  answers.erase(std::string(AnswerVocab::kUnseenToken));
  std::vector<std::string> tokens{std::string(AnswerVocab::kUnseenToken)};
  tokens.insert(tokens.end(), answers.begin(), answers.end());
  return AnswerVocab(std::move(tokens));
}

namespace {

bool is_capitalized(const std::string& t) {
  return !t.empty() && std::isupper(static_cast<unsigned char>(t[0])) != 0;
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

constexpr std::array<std::string_view, 22> kFunctionWords = {
    "the", "a", "an", "in", "on", "at", "of", "for", "to", "by", "with",
    "and", "but", "or", "it", "he", "she", "they", "we", "this", "that", "his"};

constexpr std::array<std::string_view, 9> kModals = {
    "will", "would", "should", "shall", "can", "could", "may", "might", "must"};

constexpr std::array<std::string_view, 16> kCommonVerbs = {
    "is", "are", "was", "were", "has", "have", "had", "says", "said", "wins",
    "won", "makes", "made", "gets", "got", "goes"};

constexpr std::array<std::string_view, 4> kVerbSuffixes = {"ed", "ing", "es", "ize"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& words, const std::string& w) {
  return std::find(words.begin(), words.end(), w) != words.end();
}

bool is_word(const std::string& t) {
  return !t.empty() && std::all_of(t.begin(), t.end(), [](unsigned char c) {
    return std::isalpha(c) != 0 || c == '-' || c == '\'';
  });
}

}  // namespace

SentenceAnnotation annotate_sentence(std::span<const std::string> tokens) {
  SentenceAnnotation out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (!is_capitalized(tokens[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < tokens.size() && is_capitalized(tokens[j])) ++j;
    std::size_t start = i;
    // A sentence-initial function word is capitalized only by position.
    if (start == 0 && contains(kFunctionWords, to_lower(tokens[0]))) ++start;
    if (start < j) out.entities.push_back({start, j, EntityType::Misc});
    i = j;
  }

  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const std::string w = to_lower(tokens[t]);
    if (contains(kModals, w) && t + 1 < tokens.size() && !is_capitalized(tokens[t + 1]) &&
        is_word(tokens[t + 1])) {
      out.root = t + 1;
      return out;
    }
    if (is_capitalized(tokens[t]) || !is_word(tokens[t])) continue;
    if (contains(kCommonVerbs, w)) {
      out.root = t;
      return out;
    }
    for (auto suffix : kVerbSuffixes) {
      if (w.size() > suffix.size() + 2 && ends_with(w, suffix)) {
        out.root = t;
        return out;
      }
    }
  }
  out.root = 0;
  return out;
}

}  // namespace qasumm
