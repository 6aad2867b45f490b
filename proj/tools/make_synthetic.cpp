// Writes the toy corpus used by the acceptance suite, for demos and smoke runs.
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "synthetic/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic corpus in the qasumm JSONL format"};
  qasumm::synthetic::CorpusSpec spec;
  std::string output;
  app.add_option("--documents", spec.documents, "Number of articles");
  app.add_option("--seed", spec.seed, "Generator seed");
  app.add_option("--output", output, "Output path (default: stdout)");
  CLI11_PARSE(app, argc, argv);

  const std::string text = qasumm::synthetic::corpus_text(spec);
  if (output.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write '" << output << "'\n";
    return 1;
  }
  out << text;
  return 0;
}
