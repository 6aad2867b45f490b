#include "qasumm/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "qasumm/cloze.hpp"
#include "qasumm/config.hpp"
#include "qasumm/corpus.hpp"
#include "qasumm/metrics.hpp"
#include "qasumm/model.hpp"
#include "qasumm/trainer.hpp"

namespace qasumm {

using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kSeedEnv = "QASUMM_SEED";

std::uint64_t parse_seed(const std::string& text, const std::string& source) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(source + ": seed must be a non-negative integer, got '" + text + "'");
  }
}

// Flag wins over the environment, which wins over the config file.
std::uint64_t resolve_seed(const std::string& flag, std::uint64_t from_config) {
  if (!flag.empty()) return parse_seed(flag, "--seed");
  if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') {
    return parse_seed(env, kSeedEnv);
  }
  return from_config;
}

RunConfig load_config(const std::string& path, const std::string& seed_flag) {
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error("config file '" + path + "' does not exist");
  }
  RunConfig cfg = load_run_config(path);
  cfg.training.seed = resolve_seed(seed_flag, cfg.training.seed);
  return cfg;
}

class OutputFile {
 public:
  OutputFile(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
      return;
    }
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    file_.open(p, std::ios::binary);
    if (!file_) throw std::runtime_error("cannot write '" + path + "'");
    stream_ = &file_;
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

std::string join(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

// --- prep ---------------------------------------------------------------------

void run_prep(const std::string& input, const std::string& output, std::ostream& out) {
  std::ifstream in(input);
  if (!in) throw std::runtime_error("cannot open input file '" + input + "'");
  OutputFile sink(output, out);
  std::string line;
  std::size_t line_no = 0;
  std::size_t annotated = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ojson rec;
    try {
      rec = ojson::parse(line);
      const auto abstract = rec.at("abstract").get<std::vector<std::vector<std::string>>>();
      rec.at("source");
      rec.at("id");
      const bool need_entities = !rec.contains("entities");
      const bool need_roots = !rec.contains("roots");
      if (need_entities || need_roots) {
        ojson entities = ojson::array();
        ojson roots = ojson::array();
        for (const auto& sentence : abstract) {
          if (sentence.empty()) throw DataError("empty abstract sentence");
          const SentenceAnnotation a = annotate_sentence(sentence);
          ojson spans = ojson::array();
          for (const auto& e : a.entities) {
            spans.push_back({e.start, e.end, std::string(to_string(e.type))});
          }
          entities.push_back(spans);
          roots.push_back(a.root);
        }
        if (need_entities) rec["entities"] = entities;
        if (need_roots) rec["roots"] = roots;
        ++annotated;
      }
    } catch (const nlohmann::json::exception& e) {
      throw DataError(input + ":" + std::to_string(line_no) + ": malformed record: " + e.what());
    } catch (const DataError& e) {
      throw DataError(input + ":" + std::to_string(line_no) + ": " + e.what());
    }
    sink.get() << rec.dump() << '\n';
  }
  spdlog::info("prep: {} record(s) annotated heuristically", annotated);
}

// --- genq ---------------------------------------------------------------------

void run_genq(const std::string& corpus, AnswerMode mode, std::size_t k, std::uint64_t seed,
              std::size_t max_input_len, const std::string& output, std::ostream& out) {
  const auto docs = load_corpus(corpus, max_input_len);
  OutputFile sink(output, out);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    Rng rng(document_seed(seed, i));
    const auto pairs = make_qa_pairs(docs[i], mode, k, rng);
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      ojson rec;
      rec["id"] = docs[i].id;
      rec["k"] = j;
      rec["question"] = join(pairs[j].question_tokens);
      rec["answer"] = pairs[j].answer_token;
      rec["origin_sentence"] = pairs[j].origin_sentence;
      sink.get() << rec.dump() << '\n';
    }
  }
}

// --- training ----------------------------------------------------------------

struct Workspace {
  Vocabulary vocab;
  AnswerVocab answers;
  std::vector<Example> train;
  std::vector<Example> valid;
};

std::vector<Document> load_split(const std::filesystem::path& path, std::size_t max_len) {
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error("input file '" + path.string() + "' does not exist");
  }
  return load_corpus(path, max_len);
}

Workspace prepare_from_data(const RunConfig& cfg) {
  Workspace ws;
  const auto train_docs = load_split(cfg.train, cfg.max_input_len);
  if (train_docs.empty()) throw std::runtime_error("training corpus '" + cfg.train.string() + "' is empty");
  ws.vocab = build_vocab(train_docs, cfg.vocab_cap);
  ws.answers = build_answer_vocab(train_docs, cfg.training.mode, cfg.training.k, cfg.training.seed);
  spdlog::info("{} training documents, vocabulary {}, {} unique answers", train_docs.size(),
               ws.vocab.size(), ws.answers.unique_answers());
  ws.train = make_examples(train_docs, ws.vocab, ws.answers, cfg.training.mode, cfg.training.k,
                           cfg.training.seed);
  if (!cfg.valid.empty()) {
    const auto valid_docs = load_split(cfg.valid, cfg.max_input_len);
    ws.valid = make_examples(valid_docs, ws.vocab, ws.answers, cfg.training.mode, cfg.training.k,
                             cfg.training.seed);
  }
  return ws;
}

SummarizationModel fresh_model(const RunConfig& cfg, const Workspace& ws) {
  ModelConfig mc = cfg.model;
  mc.vocab_size = ws.vocab.size();
  mc.answer_count = ws.answers.size();
  SummarizationModel model(mc);
  if (!cfg.embeddings.empty()) {
    if (!std::filesystem::exists(cfg.embeddings)) {
      throw std::runtime_error("embedding file '" + cfg.embeddings.string() + "' does not exist");
    }
    const Tensor table = load_embeddings(cfg.embeddings, ws.vocab, mc.embed_dim,
                                         derive_seed(cfg.training.seed, {0x656d62}));
    model.initialize(cfg.training.seed, &table);
  } else {
    model.initialize(cfg.training.seed);
  }
  return model;
}

SummarizationModel model_from_checkpoint(const Checkpoint& ckpt) {
  SummarizationModel model(ckpt.model);
  model.initialize(0);
  model.set_params(ckpt.params);
  return model;
}

void finish_checkpoint(Checkpoint& ckpt, const RunConfig& cfg, const Workspace& ws) {
  ckpt.vocab = ws.vocab.tokens();
  ckpt.answers = ws.answers.tokens();
  ckpt.config_hash = cfg.hash();
}

std::filesystem::path checkpoint_path(const std::string& flag, const RunConfig& cfg) {
  if (!flag.empty()) return flag;
  if (!cfg.checkpoint.empty()) return cfg.checkpoint;
  throw ConfigError("no checkpoint path: pass --checkpoint or set output.checkpoint");
}

void run_pretrain(const RunConfig& cfg, const std::string& ckpt_flag) {
  const auto path = checkpoint_path(ckpt_flag, cfg);
  Workspace ws = prepare_from_data(cfg);
  SummarizationModel model = fresh_model(cfg, ws);
  TrainConfig tc = cfg.training;
  if (tc.pretrain_epochs == 0) tc.pretrain_epochs = 1;
  Trainer trainer(model, tc);
  trainer.pretrain(ws.train);
  Checkpoint ckpt = trainer.snapshot(0, {});
  finish_checkpoint(ckpt, cfg, ws);
  save_checkpoint(path, ckpt);
  spdlog::info("pretrained checkpoint written to {}", path.string());
}

void run_train(const RunConfig& cfg, const std::string& init, const std::string& ckpt_flag) {
  const auto path = checkpoint_path(ckpt_flag, cfg);
  Workspace ws;
  std::optional<SummarizationModel> model;
  std::optional<Checkpoint> start;
  if (!init.empty()) {
    start = load_checkpoint(init, cfg.hash());
    ws.vocab = Vocabulary(start->vocab);
    ws.answers = AnswerVocab(start->answers);
    const auto train_docs = load_split(cfg.train, cfg.max_input_len);
    ws.train = make_examples(train_docs, ws.vocab, ws.answers, cfg.training.mode, cfg.training.k,
                             cfg.training.seed);
    if (!cfg.valid.empty()) {
      const auto valid_docs = load_split(cfg.valid, cfg.max_input_len);
      ws.valid = make_examples(valid_docs, ws.vocab, ws.answers, cfg.training.mode,
                               cfg.training.k, cfg.training.seed);
    }
    model.emplace(model_from_checkpoint(*start));
  } else {
    ws = prepare_from_data(cfg);
    model.emplace(fresh_model(cfg, ws));
  }
  if (ws.train.empty()) throw std::runtime_error("training corpus is empty");

  Trainer trainer(*model, cfg.training);
  if (start) {
    trainer.restore(*start);
  } else if (cfg.training.pretrain_epochs > 0) {
    trainer.pretrain(ws.train);
  }
  Checkpoint best = trainer.fit(ws.train, ws.valid);
  finish_checkpoint(best, cfg, ws);
  save_checkpoint(path, best);
  spdlog::info("checkpoint (epoch {}) written to {}", best.epoch, path.string());
}

// --- summarize / eval ---------------------------------------------------------

struct Loaded {
  Checkpoint ckpt;
  Vocabulary vocab;
  AnswerVocab answers;
};

Loaded load_for_inference(const RunConfig& cfg, const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error("checkpoint '" + path + "' does not exist");
  }
  Loaded out;
  out.ckpt = load_checkpoint(path, cfg.hash());
  out.vocab = Vocabulary(out.ckpt.vocab);
  out.answers = AnswerVocab(out.ckpt.answers);
  return out;
}

std::string overlay(std::span<const std::string> tokens, std::span<const std::uint8_t> mask) {
  std::string out;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const bool on = mask[t] != 0;
    const bool starts = on && (t == 0 || mask[t - 1] == 0);
    const bool ends = on && (t + 1 == tokens.size() || mask[t + 1] == 0);
    if (t > 0) out += ' ';
    if (starts) out += "[[";
    out += tokens[t];
    if (ends) out += "]]";
  }
  return out;
}

void run_summarize(const RunConfig& cfg, const std::string& ckpt_path, const std::string& input,
                   const std::string& output, std::ostream& out) {
  const Loaded loaded = load_for_inference(cfg, ckpt_path);
  const SummarizationModel model = model_from_checkpoint(loaded.ckpt);
  const auto docs = load_split(input, cfg.max_input_len);
  OutputFile sink(output, out);
  for (const Document& doc : docs) {
    const auto ids = loaded.vocab.encode(doc.source_tokens);
    const SummaryMask mask =
        greedy_decode(model.policy(), model.params(), model.encode_document(ids));
    ojson rec;
    rec["id"] = doc.id;
    rec["mask"] = std::vector<int>(mask.begin(), mask.end());
    rec["summary_text"] = join(select<std::string>(doc.source_tokens, mask));
    ojson segments = ojson::array();
    for (const Span& s : selected_segments(mask)) segments.push_back({s.start, s.end});
    rec["segments"] = segments;
    rec["overlay"] = overlay(doc.source_tokens, mask);
    sink.get() << rec.dump() << '\n';
  }
}

ojson rouge_json(const RougeScore& s) {
  return ojson{{"p", s.precision}, {"r", s.recall}, {"f1", s.f1}};
}

void run_eval(const RunConfig& cfg, const std::string& ckpt_path, const std::string& input,
              const std::string& report_flag, std::ostream& out) {
  const Loaded loaded = load_for_inference(cfg, ckpt_path);
  const SummarizationModel model = model_from_checkpoint(loaded.ckpt);
  const auto docs = load_split(input, cfg.max_input_len);
  const auto examples = make_examples(docs, loaded.vocab, loaded.answers, cfg.training.mode,
                                      cfg.training.k, cfg.training.seed);
  const EvalReport report = evaluate(model, examples);

  ojson j;
  ojson per_doc = ojson::array();
  for (const DocumentReport& d : report.documents) {
    per_doc.push_back(ojson{{"id", d.id},
                            {"rouge1", rouge_json(d.rouge.r1)},
                            {"rouge2", rouge_json(d.rouge.r2)},
                            {"rougeL", rouge_json(d.rouge.rl)},
                            {"qa_correct", d.correct},
                            {"qa_total", d.questions}});
  }
  j["documents"] = per_doc;
  j["corpus"] = ojson{{"count", report.documents.size()},
                      {"rouge1", rouge_json(report.mean.r1)},
                      {"rouge2", rouge_json(report.mean.r2)},
                      {"rougeL", rouge_json(report.mean.rl)},
                      {"qa_accuracy", report.qa_accuracy}};
  const std::string path = !report_flag.empty() ? report_flag : cfg.report.string();
  OutputFile sink(path, out);
  sink.get() << j.dump(2) << '\n';
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Question-focused extractive summarization: training and evaluation"};
  app.name("qasumm");
  app.require_subcommand(1);

  std::string config, input, output, checkpoint, init, report, corpus, seed;
  std::string mode = "entity";
  std::size_t k = 1;
  std::size_t max_len = kDefaultMaxInputLen;

  auto* prep = app.add_subcommand("prep", "Annotate raw tokenized records with heuristic entities/roots");
  prep->add_option("--input", input, "Raw JSONL (original casing)")->required();
  prep->add_option("--output", output, "Annotated JSONL (default: stdout)");

  auto* genq = app.add_subcommand("genq", "Generate Cloze question-answer pairs");
  genq->add_option("--corpus", corpus, "Annotated corpus JSONL")->required();
  genq->add_option("--mode", mode, "entity or keyword")->check(CLI::IsMember({"entity", "keyword"}));
  genq->add_option("--k", k, "Pairs per document")->check(CLI::PositiveNumber);
  genq->add_option("--seed", seed, "Random seed");
  genq->add_option("--max-input-len", max_len, "Source truncation length");
  genq->add_option("--output", output, "Output JSONL (default: stdout)");

  auto* pretrain = app.add_subcommand("pretrain", "Bigram-label pretraining of the extraction policy");
  pretrain->add_option("--config", config, "Run configuration JSON")->required();
  pretrain->add_option("--checkpoint", checkpoint, "Output checkpoint path");
  pretrain->add_option("--seed", seed, "Random seed");

  auto* train = app.add_subcommand("train", "Policy-gradient training against the QA reward");
  train->add_option("--config", config, "Run configuration JSON")->required();
  train->add_option("--init", init, "Start from this checkpoint (skips pretraining)");
  train->add_option("--checkpoint", checkpoint, "Output checkpoint path");
  train->add_option("--seed", seed, "Random seed");

  auto* summarize = app.add_subcommand("summarize", "Greedy-decode summaries");
  summarize->add_option("--config", config, "Run configuration JSON")->required();
  summarize->add_option("--checkpoint", checkpoint, "Trained checkpoint")->required();
  summarize->add_option("--input", input, "Corpus JSONL to summarize")->required();
  summarize->add_option("--output", output, "Output JSONL (default: stdout)");

  auto* eval = app.add_subcommand("eval", "ROUGE and QA accuracy report");
  eval->add_option("--config", config, "Run configuration JSON")->required();
  eval->add_option("--checkpoint", checkpoint, "Trained checkpoint")->required();
  eval->add_option("--input", input, "Corpus JSONL with abstracts")->required();
  eval->add_option("--report", report, "Report path (default: output.report or stdout)");
  eval->add_option("--seed", seed, "Random seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (prep->parsed()) {
      run_prep(input, output, out);
    } else if (genq->parsed()) {
      run_genq(corpus, parse_answer_mode(mode), k, resolve_seed(seed, 1), max_len, output, out);
    } else if (pretrain->parsed()) {
      run_pretrain(load_config(config, seed), checkpoint);
    } else if (train->parsed()) {
      run_train(load_config(config, seed), init, checkpoint);
    } else if (summarize->parsed()) {
      run_summarize(load_config(config, seed), checkpoint, input, output, out);
    } else if (eval->parsed()) {
      run_eval(load_config(config, seed), checkpoint, input, report, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int dispatch(int argc, char** argv) {
  auto logger = spdlog::stderr_logger_st("qasumm");
  spdlog::set_default_logger(logger);
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace qasumm
