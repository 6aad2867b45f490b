#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qasumm/tensor.hpp"

namespace qasumm {

// Raised for malformed input files (corpus, embeddings, checkpoints, configs).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EntityType { Per, Loc, Org, Misc };

std::string_view to_string(EntityType type);
EntityType parse_entity_type(std::string_view text);

// Half-open token range [start, end).
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const Span&, const Span&) = default;
};

struct EntitySpan {
  std::size_t start = 0;
  std::size_t end = 0;
  EntityType type = EntityType::Misc;
  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

// A source article with its reference abstract. Entity spans and roots are
// sentence-local offsets into abstract_sentences.
struct Document {
  std::string id;
  std::vector<std::string> source_tokens;
  std::vector<Span> sentence_bounds;
  std::vector<std::vector<std::string>> abstract_sentences;
  std::vector<std::vector<EntitySpan>> entity_spans;
  std::vector<std::size_t> root_index;

  // Throws DataError naming the document id when an invariant is violated.
  void validate() const;
};

inline constexpr std::size_t kDefaultMaxInputLen = 100;

void truncate_source(Document& doc, std::size_t max_input_len);

// Parses one corpus record (see README for the schema). Tokens are lowercased.
Document parse_document(std::string_view json_line, std::size_t max_input_len = kDefaultMaxInputLen);
std::vector<Document> load_corpus(const std::filesystem::path& path,
                                  std::size_t max_input_len = kDefaultMaxInputLen);

std::string to_lower(std::string_view s);

class Vocabulary {
 public:
  static constexpr int kUnk = 0;
  static constexpr int kBlank = 1;
  static constexpr std::size_t kReserved = 2;
  static constexpr std::string_view kUnkToken = "<unk>";
  static constexpr std::string_view kBlankToken = "___";

  Vocabulary();
  // Rebuilds from a saved token list; the first two entries must be the reserved tokens.
  explicit Vocabulary(std::vector<std::string> tokens);

  int index(std::string_view token) const;
  const std::string& token(int index) const { return tokens_.at(static_cast<std::size_t>(index)); }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<int> encode(std::span<const std::string> tokens) const;

 private:
  void push(std::string token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

// Keeps the cap - 2 most frequent tokens over source and abstract text.
// Frequency ties are broken lexicographically.
Vocabulary build_vocab(std::span<const Document> docs, std::size_t cap);

// Rows for words found in the file are copied; every other row is drawn from
// uniform(-0.05, 0.05) using `seed`. Matching is case-insensitive.
Tensor load_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                       std::size_t dim, std::uint64_t seed);
Tensor random_embeddings(const Vocabulary& vocab, std::size_t dim, std::uint64_t seed);

}  // namespace qasumm
