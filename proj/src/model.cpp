#include "qasumm/model.hpp"

#include <stdexcept>

namespace qasumm {

void ModelConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("model config: ") + what);
  };
  require(vocab_size >= 2, "vocab_size must be at least 2");
  require(answer_count >= 1, "answer_count must be at least 1");
  require(embed_dim > 0 && doc_hidden > 0 && qa_hidden > 0 && decision_hidden > 0,
          "dimensions must be positive");
  require(dropout >= 0.0 && dropout < 1.0, "dropout must be in [0, 1)");
  require(encoder_dropout >= 0.0 && encoder_dropout < 1.0, "encoder_dropout must be in [0, 1)");
  require(!share_encoders || doc_hidden == qa_hidden,
          "share_encoders requires doc_hidden == qa_hidden");
}

namespace {

BiLstmEncoder make_doc_encoder(const ModelConfig& c) {
  if (c.share_encoders) return BiLstmEncoder("qenc", "embed", c.embed_dim, c.qa_hidden);
  return BiLstmEncoder("denc", "embed", c.embed_dim, c.doc_hidden);
}

}  // namespace

SummarizationModel::SummarizationModel(ModelConfig config)
    : config_((config.validate(), config)),
      doc_encoder_(make_doc_encoder(config_)),
      policy_(doc_encoder_.output_dim(), config_.decision_hidden, config_.dropout),
      reader_(BiLstmEncoder("qenc", "embed", config_.embed_dim, config_.qa_hidden),
              config_.answer_count) {}

void SummarizationModel::initialize(std::uint64_t seed, const Tensor* embeddings) {
  params_ = ParamStore();
  Rng rng(seed);
  Tensor embed({config_.vocab_size, config_.embed_dim});
  uniform_fill(embed, -0.05, 0.05, rng);
  if (embeddings != nullptr) {
    if (embeddings->shape() != embed.shape()) {
      throw std::invalid_argument("embedding table shape does not match the model config");
    }
    embed = *embeddings;
  }
  params_.add("embed", std::move(embed));
  if (!config_.share_encoders) doc_encoder_.add_params(params_, rng);
  reader_.encoder().add_params(params_, rng);
  reader_.add_params(params_, rng);
  policy_.add_params(params_, rng);
}

void SummarizationModel::set_params(ParamStore params) {
  for (const auto& name : params_.names()) {
    if (!params.contains(name) || params.value(name).shape() != params_.value(name).shape()) {
      throw std::invalid_argument("parameter '" + name + "' missing or mis-shaped");
    }
  }
  if (params.names().size() != params_.names().size()) {
    throw std::invalid_argument("parameter set does not match the model");
  }
  params_ = std::move(params);
}

std::vector<Example> make_examples(std::span<const Document> docs, const Vocabulary& vocab,
                                   const AnswerVocab& answers, AnswerMode mode, std::size_t k,
                                   std::uint64_t seed) {
  std::vector<Example> out;
  out.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    Example ex;
    ex.index = i;
    ex.doc = docs[i];
    ex.source_ids = vocab.encode(ex.doc.source_tokens);
    Rng rng(document_seed(seed, i));
    ex.qa_pairs = make_qa_pairs(ex.doc, mode, k, rng);
    assign_answers(ex.qa_pairs, answers);
    for (const QAPair& p : ex.qa_pairs) {
      ex.questions.push_back({vocab.encode(p.question_tokens), p.answer_index});
    }
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace qasumm
