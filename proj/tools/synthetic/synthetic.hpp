#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qasumm::synthetic {

// Toy news corpus with a known answer: each article hides two "highlight"
// sentences among filler sentences. The abstract is the two highlights
// verbatim and both mention the article's subject entity, which is marked
// as an entity span in the abstract.
struct CorpusSpec {
  std::size_t documents = 50;
  std::size_t sentences = 6;  // per article, including the two highlights
  std::size_t highlight_len = 12;
  std::size_t filler_len = 9;
  std::uint64_t seed = 7;
};

// One JSON object per line in the corpus format accepted by load_corpus.
std::vector<std::string> corpus_lines(const CorpusSpec& spec);

std::string corpus_text(const CorpusSpec& spec);

}  // namespace qasumm::synthetic
