#include "qasumm/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "qasumm/numerics.hpp"

namespace qasumm {

using nlohmann::json;

std::string_view to_string(EntityType type) {
  switch (type) {
    case EntityType::Per: return "PER";
    case EntityType::Loc: return "LOC";
    case EntityType::Org: return "ORG";
    case EntityType::Misc: return "MISC";
  }
  return "MISC";
}

EntityType parse_entity_type(std::string_view text) {
  if (text == "PER") return EntityType::Per;
  if (text == "LOC") return EntityType::Loc;
  if (text == "ORG") return EntityType::Org;
  if (text == "MISC") return EntityType::Misc;
  throw DataError("unknown entity type '" + std::string(text) + "'");
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

void Document::validate() const {
  auto fail = [this](const std::string& what) {
    throw DataError("document '" + id + "': " + what);
  };
  if (source_tokens.empty()) fail("empty source");
  if (abstract_sentences.empty()) fail("empty abstract");
  if (entity_spans.size() != abstract_sentences.size()) fail("entities do not match abstract sentences");
  if (root_index.size() != abstract_sentences.size()) fail("roots do not match abstract sentences");
  for (const Span& s : sentence_bounds) {
    if (s.start >= s.end || s.end > source_tokens.size()) fail("sentence bound out of range");
  }
  for (std::size_t i = 0; i < abstract_sentences.size(); ++i) {
    const std::size_t n = abstract_sentences[i].size();
    if (n == 0) fail("empty abstract sentence " + std::to_string(i));
    if (root_index[i] >= n) fail("root index out of range in abstract sentence " + std::to_string(i));
    for (const EntitySpan& e : entity_spans[i]) {
      if (e.start >= e.end || e.end > n) {
        fail("entity span [" + std::to_string(e.start) + ", " + std::to_string(e.end) +
             ") out of range in abstract sentence " + std::to_string(i));
      }
    }
  }
}

void truncate_source(Document& doc, std::size_t max_input_len) {
  const std::size_t limit = std::max<std::size_t>(1, max_input_len);
  if (doc.source_tokens.size() <= limit) return;
  doc.source_tokens.resize(limit);
  std::vector<Span> kept;
  for (Span s : doc.sentence_bounds) {
    if (s.start >= limit) break;
    s.end = std::min(s.end, limit);
    kept.push_back(s);
  }
  doc.sentence_bounds = std::move(kept);
}

namespace {

std::vector<std::vector<std::string>> read_sentences(const json& j, const std::string& key) {
  std::vector<std::vector<std::string>> out;
  for (const auto& sentence : j.at(key)) {
    std::vector<std::string> tokens;
    for (const auto& tok : sentence) tokens.push_back(to_lower(tok.get<std::string>()));
    out.push_back(std::move(tokens));
  }
  return out;
}

}  // namespace

Document parse_document(std::string_view json_line, std::size_t max_input_len) {
  const json j = json::parse(json_line);
  if (!j.is_object()) throw DataError("record is not a JSON object");
  Document doc;
  doc.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();

  auto with_id = [&doc](const std::string& what) {
    return DataError("document '" + doc.id + "': " + what);
  };
  if (!j.contains("source")) throw with_id("missing field 'source'");
  if (!j.contains("abstract")) throw with_id("missing field 'abstract'");
  if (!j.contains("roots")) throw with_id("missing field 'roots'");

  try {
    for (const auto& sentence : read_sentences(j, "source")) {
      if (sentence.empty()) continue;
      const std::size_t start = doc.source_tokens.size();
      doc.source_tokens.insert(doc.source_tokens.end(), sentence.begin(), sentence.end());
      doc.sentence_bounds.push_back({start, doc.source_tokens.size()});
    }
    doc.abstract_sentences = read_sentences(j, "abstract");
    for (const auto& r : j.at("roots")) doc.root_index.push_back(r.get<std::size_t>());
    doc.entity_spans.resize(doc.abstract_sentences.size());
    if (j.contains("entities")) {
      const auto& ents = j.at("entities");
      if (ents.size() != doc.abstract_sentences.size()) {
        throw with_id("'entities' must have one list per abstract sentence");
      }
      for (std::size_t i = 0; i < ents.size(); ++i) {
        for (const auto& e : ents[i]) {
          doc.entity_spans[i].push_back({e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>(),
                                         parse_entity_type(e.at(2).get<std::string>())});
        }
      }
    }
  } catch (const json::exception& e) {
    throw with_id(e.what());
  }
  doc.validate();
  truncate_source(doc, max_input_len);
  return doc;
}

std::vector<Document> load_corpus(const std::filesystem::path& path, std::size_t max_input_len) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file '" + path.string() + "'");
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      docs.push_back(parse_document(line, max_input_len));
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed record: " +
                      e.what());
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return docs;
}

Vocabulary::Vocabulary() {
  push(std::string(kUnkToken));
  push(std::string(kBlankToken));
}

Vocabulary::Vocabulary(std::vector<std::string> tokens) {
  if (tokens.size() < kReserved || tokens[kUnk] != kUnkToken || tokens[kBlank] != kBlankToken) {
    throw DataError("vocabulary must start with the reserved tokens");
  }
  for (auto& t : tokens) push(std::move(t));
}

void Vocabulary::push(std::string token) {
  const int idx = static_cast<int>(tokens_.size());
  if (!index_.emplace(token, idx).second) throw DataError("duplicate vocabulary entry '" + token + "'");
  tokens_.push_back(std::move(token));
}

int Vocabulary::index(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

std::vector<int> Vocabulary::encode(std::span<const std::string> tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(index(t));
  return out;
}

Vocabulary build_vocab(std::span<const Document> docs, std::size_t cap) {
  std::map<std::string, std::size_t> counts;
  auto count = [&counts](const std::string& t) {
    if (t != Vocabulary::kUnkToken && t != Vocabulary::kBlankToken) ++counts[t];
  };
  for (const Document& d : docs) {
    for (const auto& t : d.source_tokens) count(t);
    for (const auto& s : d.abstract_sentences) {
      for (const auto& t : s) count(t);
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<std::string> tokens{std::string(Vocabulary::kUnkToken),
                                  std::string(Vocabulary::kBlankToken)};
  const std::size_t keep = cap > Vocabulary::kReserved ? cap - Vocabulary::kReserved : 0;
  for (std::size_t i = 0; i < ranked.size() && i < keep; ++i) tokens.push_back(ranked[i].first);
  return Vocabulary(std::move(tokens));
}

Tensor random_embeddings(const Vocabulary& vocab, std::size_t dim, std::uint64_t seed) {
  Tensor table({vocab.size(), dim});
  Rng rng(seed);
  uniform_fill(table, -0.05, 0.05, rng);
  return table;
}

Tensor load_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                       std::size_t dim, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file '" + path.string() + "'");
  Tensor table = random_embeddings(vocab, dim, seed);
  std::vector<bool> filled(vocab.size(), false);

  std::string line;
  Vec values;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    values.clear();
    std::string num;
    while (fields >> num) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
      if (ec != std::errc() || ptr != num.data() + num.size()) {
        throw DataError("embedding for '" + word + "': bad number '" + num + "'");
      }
      values.push_back(v);
    }
    if (values.size() != dim) {
      throw DataError("embedding for '" + word + "' has " + std::to_string(values.size()) +
                      " values, expected " + std::to_string(dim));
    }
    const int idx = vocab.index(to_lower(word));
    if (idx == Vocabulary::kUnk && to_lower(word) != Vocabulary::kUnkToken) continue;
    if (filled[static_cast<std::size_t>(idx)]) continue;
    filled[static_cast<std::size_t>(idx)] = true;
    std::copy(values.begin(), values.end(), table.row(static_cast<std::size_t>(idx)).begin());
  }
  return table;
}

}  // namespace qasumm
