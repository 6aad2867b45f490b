#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qasumm/trainer.hpp"

namespace qasumm {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "qasumm.checkpoint";
constexpr int kVersion = 1;

json tensor_to_json(const Tensor& t) {
  return json{{"shape", t.shape()}, {"data", std::vector<double>(t.data().begin(), t.data().end())}};
}

Tensor tensor_from_json(const json& j) {
  return Tensor(j.at("shape").get<std::vector<std::size_t>>(), j.at("data").get<std::vector<double>>());
}

json tensors_to_json(const std::map<std::string, Tensor>& tensors) {
  json out = json::object();
  for (const auto& [name, t] : tensors) out[name] = tensor_to_json(t);
  return out;
}

std::map<std::string, Tensor> tensors_from_json(const json& j) {
  std::map<std::string, Tensor> out;
  for (const auto& [name, t] : j.items()) out.emplace(name, tensor_from_json(t));
  return out;
}

json model_to_json(const ModelConfig& m) {
  return json{{"vocab_size", m.vocab_size},       {"answer_count", m.answer_count},
              {"embed_dim", m.embed_dim},         {"doc_hidden", m.doc_hidden},
              {"qa_hidden", m.qa_hidden},         {"decision_hidden", m.decision_hidden},
              {"dropout", m.dropout},             {"encoder_dropout", m.encoder_dropout},
              {"share_encoders", m.share_encoders}};
}

ModelConfig model_from_json(const json& j) {
  ModelConfig m;
  m.vocab_size = j.at("vocab_size").get<std::size_t>();
  m.answer_count = j.at("answer_count").get<std::size_t>();
  m.embed_dim = j.at("embed_dim").get<std::size_t>();
  m.doc_hidden = j.at("doc_hidden").get<std::size_t>();
  m.qa_hidden = j.at("qa_hidden").get<std::size_t>();
  m.decision_hidden = j.at("decision_hidden").get<std::size_t>();
  m.dropout = j.at("dropout").get<double>();
  m.encoder_dropout = j.at("encoder_dropout").get<double>();
  m.share_encoders = j.at("share_encoders").get<bool>();
  return m;
}

}  // namespace

std::string fingerprint(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["config_hash"] = ckpt.config_hash;
  j["model"] = model_to_json(ckpt.model);
  j["vocab"] = ckpt.vocab;
  j["answers"] = ckpt.answers;
  j["epoch"] = ckpt.epoch;
  j["lr"] = ckpt.lr;
  j["history"] = ckpt.history;
  j["params"] = tensors_to_json(ckpt.params.values());
  j["optimizer"] = json{{"steps", ckpt.optimizer_steps},
                        {"m", tensors_to_json(ckpt.adam_m)},
                        {"v", tensors_to_json(ckpt.adam_v)}};
  return j.dump() + "\n";
}

Checkpoint parse_checkpoint(std::string_view text, const std::string& expected_hash) {
  Checkpoint ckpt;
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != kFormat) throw DataError("not a checkpoint file");
    if (j.at("version").get<int>() != kVersion) {
      throw DataError("unsupported checkpoint version " + j.at("version").dump());
    }
    ckpt.config_hash = j.at("config_hash").get<std::string>();
    if (!expected_hash.empty() && ckpt.config_hash != expected_hash) {
      throw DataError("checkpoint config hash " + ckpt.config_hash +
                      " does not match the current configuration (" + expected_hash + ")");
    }
    ckpt.model = model_from_json(j.at("model"));
    ckpt.vocab = j.at("vocab").get<std::vector<std::string>>();
    ckpt.answers = j.at("answers").get<std::vector<std::string>>();
    ckpt.epoch = j.at("epoch").get<std::size_t>();
    ckpt.lr = j.at("lr").get<double>();
    ckpt.history = j.at("history").get<std::vector<double>>();
    for (auto& [name, t] : tensors_from_json(j.at("params"))) ckpt.params.add(name, std::move(t));
    const json& opt = j.at("optimizer");
    ckpt.optimizer_steps = opt.at("steps").get<std::uint64_t>();
    ckpt.adam_m = tensors_from_json(opt.at("m"));
    ckpt.adam_v = tensors_from_json(opt.at("v"));
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint '" + path.string() + "'");
  out << serialize_checkpoint(ckpt);
  if (!out) throw std::runtime_error("failed writing checkpoint '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const std::string& expected_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_checkpoint(buf.str(), expected_hash);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace qasumm
