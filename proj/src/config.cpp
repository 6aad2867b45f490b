#include "qasumm/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qasumm {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& known) {
  if (!obj.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (known.count(key) == 0) throw ConfigError("config: unknown key '" + where + "." + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: '" + where + "." + key + "' has the wrong type");
  }
}

void read_path(const json& obj, const char* key, std::filesystem::path& out,
               const std::string& where) {
  std::string s;
  read(obj, key, s, where);
  if (!s.empty()) out = s;
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  reject_unknown(root, "", {"data", "model", "questions", "training", "output"});

  RunConfig cfg;
  cfg.model.dropout = 0.2;
  if (root.contains("data")) {
    const json& d = root.at("data");
    reject_unknown(d, "data", {"train", "valid", "embeddings"});
    read_path(d, "train", cfg.train, "data");
    read_path(d, "valid", cfg.valid, "data");
    read_path(d, "embeddings", cfg.embeddings, "data");
  }
  if (root.contains("model")) {
    const json& m = root.at("model");
    reject_unknown(m, "model",
                   {"embed_dim", "doc_hidden", "qa_hidden", "decision_hidden", "dropout",
                    "encoder_dropout", "share_encoders", "vocab_cap", "max_input_len"});
    read(m, "embed_dim", cfg.model.embed_dim, "model");
    read(m, "doc_hidden", cfg.model.doc_hidden, "model");
    read(m, "qa_hidden", cfg.model.qa_hidden, "model");
    read(m, "decision_hidden", cfg.model.decision_hidden, "model");
    read(m, "dropout", cfg.model.dropout, "model");
    read(m, "encoder_dropout", cfg.model.encoder_dropout, "model");
    read(m, "share_encoders", cfg.model.share_encoders, "model");
    read(m, "vocab_cap", cfg.vocab_cap, "model");
    read(m, "max_input_len", cfg.max_input_len, "model");
  }
  TrainConfig& t = cfg.training;
  if (root.contains("questions")) {
    const json& q = root.at("questions");
    reject_unknown(q, "questions", {"mode", "k"});
    std::string mode = "entity";
    read(q, "mode", mode, "questions");
    try {
      t.mode = parse_answer_mode(mode);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    read(q, "k", t.k, "questions");
  }
  if (root.contains("training")) {
    const json& r = root.at("training");
    reject_unknown(r, "training",
                   {"gamma", "alpha", "beta", "delta", "lr", "batch", "epochs_max", "n_samples",
                    "seed", "lr_worsen_threshold", "patience", "baseline", "baseline_decay",
                    "train_reader", "pretrain_epochs", "pretrain_lr", "max_steps",
                    "bigram_cross_gaps", "bigram_multiset"});
    read(r, "gamma", t.weights.gamma, "training");
    read(r, "alpha", t.weights.alpha, "training");
    t.weights.beta = 2.0 * t.weights.alpha;
    read(r, "beta", t.weights.beta, "training");
    read(r, "delta", t.weights.delta, "training");
    read(r, "lr", t.lr, "training");
    read(r, "batch", t.batch, "training");
    read(r, "epochs_max", t.epochs_max, "training");
    read(r, "n_samples", t.n_samples, "training");
    read(r, "seed", t.seed, "training");
    read(r, "lr_worsen_threshold", t.lr_worsen_threshold, "training");
    read(r, "patience", t.patience, "training");
    read(r, "baseline", t.baseline, "training");
    read(r, "baseline_decay", t.baseline_decay, "training");
    read(r, "train_reader", t.train_reader, "training");
    read(r, "pretrain_epochs", t.pretrain_epochs, "training");
    read(r, "pretrain_lr", t.pretrain_lr, "training");
    read(r, "max_steps", t.max_steps, "training");
    read(r, "bigram_cross_gaps", t.bigram.cross_gaps, "training");
    read(r, "bigram_multiset", t.bigram.multiset, "training");
  }
  if (root.contains("output")) {
    const json& o = root.at("output");
    reject_unknown(o, "output", {"checkpoint", "report"});
    read_path(o, "checkpoint", cfg.checkpoint, "output");
    read_path(o, "report", cfg.report, "output");
  }

  if (cfg.train.empty()) throw ConfigError("config: 'data.train' is required");
  if (cfg.vocab_cap < Vocabulary::kReserved) throw ConfigError("config: 'model.vocab_cap' must be at least 2");
  if (cfg.max_input_len < 1) throw ConfigError("config: 'model.max_input_len' must be at least 1");
  try {
    t.validate();
    ModelConfig probe = cfg.model;
    probe.vocab_size = 2;
    probe.answer_count = 1;
    probe.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string RunConfig::hash() const {
  const json j{{"embed_dim", model.embed_dim},
               {"doc_hidden", model.doc_hidden},
               {"qa_hidden", model.qa_hidden},
               {"decision_hidden", model.decision_hidden},
               {"share_encoders", model.share_encoders},
               {"vocab_cap", vocab_cap},
               {"max_input_len", max_input_len},
               {"mode", std::string(to_string(training.mode))},
               {"k", training.k}};
  return fingerprint(j.dump());
}

}  // namespace qasumm
