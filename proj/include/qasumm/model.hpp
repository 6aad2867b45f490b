#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qasumm/cloze.hpp"
#include "qasumm/corpus.hpp"
#include "qasumm/encoders.hpp"
#include "qasumm/policy.hpp"
#include "qasumm/qa_reward.hpp"

namespace qasumm {

struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t answer_count = 0;
  std::size_t embed_dim = 100;
  std::size_t doc_hidden = 256;
  std::size_t qa_hidden = 256;
  std::size_t decision_hidden = 30;
  double dropout = 0.2;          // policy: applied twice per decision step
  double encoder_dropout = 0.0;  // document encoder inputs
  bool share_encoders = false;   // document encoder reuses the question/summary encoder

  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// All learnable state: one embedding table (`embed`), the document encoder
// (`denc.*`), the question/summary encoder (`qenc.*`), the reader (`qa.*`)
// and the policy (`policy.*`).
class SummarizationModel {
 public:
  explicit SummarizationModel(ModelConfig config);

  // Xavier-uniform weights from `seed`. When `embeddings` is given it
  // replaces the random embedding table.
  void initialize(std::uint64_t seed, const Tensor* embeddings = nullptr);

  const ModelConfig& config() const { return config_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  void set_params(ParamStore params);

  const BiLstmEncoder& doc_encoder() const { return doc_encoder_; }
  const BiLstmEncoder& qa_encoder() const { return reader_.encoder(); }
  const ExtractionPolicy& policy() const { return policy_; }
  const QaReader& reader() const { return reader_; }

  EncodedSeq encode_document(std::span<const int> tokens, const Dropout& dropout = {}) const {
    return doc_encoder_.encode(params_, tokens, dropout);
  }

 private:
  ModelConfig config_;
  BiLstmEncoder doc_encoder_;
  ExtractionPolicy policy_;
  QaReader reader_;
  ParamStore params_;
};

// A document prepared for training/evaluation: indices plus its Cloze pairs.
struct Example {
  std::size_t index = 0;  // position within its split; keys per-document random streams
  Document doc;
  std::vector<int> source_ids;
  std::vector<QAPair> qa_pairs;
  std::vector<QaQuestion> questions;
};

std::vector<Example> make_examples(std::span<const Document> docs, const Vocabulary& vocab,
                                   const AnswerVocab& answers, AnswerMode mode, std::size_t k,
                                   std::uint64_t seed);

}  // namespace qasumm
