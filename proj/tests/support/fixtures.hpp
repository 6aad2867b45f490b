#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "qasumm/model.hpp"
#include "qasumm/numerics.hpp"

namespace qasumm::testing {

inline std::vector<std::string> words(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Document with a single source sentence; entities/roots per abstract sentence.
inline Document make_doc(const std::string& source, std::vector<std::string> abstract,
                         std::vector<std::vector<EntitySpan>> entities = {},
                         std::vector<std::size_t> roots = {}) {
  Document d;
  d.id = "doc";
  d.source_tokens = words(source);
  d.sentence_bounds = {{0, d.source_tokens.size()}};
  for (const auto& s : abstract) d.abstract_sentences.push_back(words(s));
  entities.resize(d.abstract_sentences.size());
  roots.resize(d.abstract_sentences.size(), 0);
  d.entity_spans = std::move(entities);
  d.root_index = std::move(roots);
  return d;
}

// Fills every parameter with uniform(-scale, scale).
inline void randomize(ParamStore& store, std::uint64_t seed, double scale) {
  Rng rng(seed);
  for (const auto& name : store.names()) uniform_fill(store.value(name), -scale, scale, rng);
}

inline ModelConfig tiny_config(std::size_t vocab, std::size_t answers, std::size_t hidden = 3) {
  ModelConfig c;
  c.vocab_size = vocab;
  c.answer_count = answers;
  c.embed_dim = hidden;
  c.doc_hidden = hidden;
  c.qa_hidden = hidden;
  c.decision_hidden = hidden;
  c.dropout = 0.2;
  return c;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("qasumm-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace qasumm::testing
