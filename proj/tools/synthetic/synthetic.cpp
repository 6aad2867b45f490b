#include "synthetic.hpp"

#include <algorithm>
#include <random>

#include <json.hpp>

namespace qasumm::synthetic {

namespace {

const std::vector<std::string> kEntities = {
    "Liberia", "Ebola",  "Obama",  "Nasa",   "Paris",    "Google",
    "Madrid",  "Boeing", "Kenya",  "Merkel", "Toyota",   "Unicef",
};

// Highlight and filler words come from disjoint pools so that a word-level
// extractor can tell them apart.
const std::vector<std::string> kHighlightWords = {
    "vaccine", "outbreak", "officials", "announced", "shipment", "arrived",  "doctors",
    "crisis",  "talks",    "agreement", "launched",  "mission",  "record",   "profits",
    "strike",  "workers",  "summit",    "leaders",   "election", "results",  "flood",
    "rescue",  "storm",    "damage",    "verdict",   "court",    "treaty",   "signed",
    "quake",   "victims",  "funding",   "approved",  "recall",   "vehicles", "merger",
    "shares",  "protest",  "capital",   "deal",      "collapse",
};

const std::vector<std::string> kFillerWords = {
    "meanwhile", "the",      "a",         "of",       "weather",  "was",     "mild",
    "and",       "people",   "went",      "about",    "their",    "day",     "in",
    "nearby",    "towns",    "some",      "said",     "little",   "had",     "changed",
    "since",     "last",     "week",      "local",    "cafes",    "stayed",  "open",
    "traffic",   "moved",    "slowly",    "on",       "roads",    "as",      "usual",
    "residents", "gathered", "quietly",   "for",      "evening",
};

std::string pick(const std::vector<std::string>& pool, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
  return pool[d(rng)];
}

}  // namespace

std::vector<std::string> corpus_lines(const CorpusSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::vector<std::string> out;
  for (std::size_t n = 0; n < spec.documents; ++n) {
    const std::string subject = kEntities[n % kEntities.size()];
    std::vector<std::size_t> order(spec.sentences);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::size_t> highlight_at(order.begin(), order.begin() + 2);
    std::sort(highlight_at.begin(), highlight_at.end());

    nlohmann::json source = nlohmann::json::array();
    nlohmann::json abstract = nlohmann::json::array();
    nlohmann::json entities = nlohmann::json::array();
    nlohmann::json roots = nlohmann::json::array();
    for (std::size_t s = 0; s < spec.sentences; ++s) {
      std::vector<std::string> words;
      const bool highlight = s == highlight_at[0] || s == highlight_at[1];
      if (highlight) {
        for (std::size_t i = 0; i + 1 < spec.highlight_len; ++i) words.push_back(pick(kHighlightWords, rng));
        std::uniform_int_distribution<std::size_t> where(1, spec.highlight_len - 2);
        const std::size_t e = where(rng);
        words.insert(words.begin() + static_cast<long>(e), subject);
        abstract.push_back(words);
        entities.push_back(nlohmann::json::array({nlohmann::json::array({e, e + 1, "ORG"})}));
        roots.push_back(0);
      } else {
        for (std::size_t i = 0; i < spec.filler_len; ++i) words.push_back(pick(kFillerWords, rng));
      }
      source.push_back(words);
    }
    nlohmann::ordered_json rec;
    rec["id"] = "synth-" + std::to_string(n);
    rec["source"] = source;
    rec["abstract"] = abstract;
    rec["entities"] = entities;
    rec["roots"] = roots;
    out.push_back(rec.dump());
  }
  return out;
}

std::string corpus_text(const CorpusSpec& spec) {
  std::string text;
  for (const auto& line : corpus_lines(spec)) text += line + '\n';
  return text;
}

}  // namespace qasumm::synthetic
