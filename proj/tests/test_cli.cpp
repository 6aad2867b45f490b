#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "qasumm/cli.hpp"
#include "qasumm/config.hpp"
#include "support/fixtures.hpp"
#include "synthetic/synthetic.hpp"

using namespace qasumm;
using qasumm::testing::read_file;
using qasumm::testing::TempDir;
using qasumm::testing::write_file;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = dispatch(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// A small synthetic corpus plus a config that trains in well under a second.
struct Workdir {
  TempDir dir{"cli"};

  Workdir() {
    spdlog::set_level(spdlog::level::warn);
    synthetic::CorpusSpec spec;
    spec.documents = 6;
    spec.sentences = 3;
    write_file(dir / "train.jsonl", synthetic::corpus_text(spec));
    spec.seed = 8;
    spec.documents = 3;
    write_file(dir / "valid.jsonl", synthetic::corpus_text(spec));
  }

  json config(std::uint64_t seed = 5) const {
    return json{{"data", {{"train", (dir / "train.jsonl").string()},
                          {"valid", (dir / "valid.jsonl").string()}}},
                {"model", {{"embed_dim", 4}, {"doc_hidden", 3}, {"qa_hidden", 3},
                           {"decision_hidden", 2}}},
                {"training", {{"epochs_max", 2}, {"batch", 3}, {"pretrain_epochs", 1},
                              {"seed", seed}, {"lr", 1e-3}}}};
  }

  std::string write_config(const json& j, const std::string& name = "config.json") const {
    const auto p = dir / name;
    write_file(p, j.dump());
    return p.string();
  }

  std::string path(const std::string& name) const { return (dir / name).string(); }
};

std::vector<json> jsonl(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse_run_config(R"({"data": {"train": "t.jsonl"}, "training": {"alpha": 3}})");
  CHECK(c.train == "t.jsonl");
  CHECK(c.training.weights.alpha == 3.0);
  CHECK(c.training.weights.beta == 6.0);
  CHECK(c.training.weights.gamma == 8.0);
  CHECK(c.training.weights.delta == doctest::Approx(0.4));
  CHECK(c.model.dropout == doctest::Approx(0.2));

  const RunConfig d = parse_run_config(R"({"data": {"train": "t"}, "training": {"alpha": 3, "beta": 1}})");
  CHECK(d.training.weights.beta == 1.0);

  CHECK_THROWS_AS(parse_run_config(R"({"data": {"train": "t"}, "modle": {}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"data": {"train": "t"}, "training": {"gama": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"data": {}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"data": {"train": 4}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"data": {"train": "t"}, "questions": {"mode": "verb"}})"),
                  ConfigError);

  // Only settings that shape the model change the fingerprint.
  RunConfig e = c;
  e.training.lr = 0.5;
  CHECK(e.hash() == c.hash());
  e.model.doc_hidden += 1;
  CHECK(e.hash() != c.hash());
}

TEST_CASE("usage errors exit with 2") {
  const Run unknown = run({"train", "--config", "x.json", "--frobnicate"});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("frobnicate") != std::string::npos);
  CHECK(unknown.err.find("Usage") != std::string::npos);

  CHECK(run({}).code == 2);
  CHECK(run({"dance"}).code == 2);
  CHECK(run({"genq", "--corpus", "x", "--mode", "verbs"}).code == 2);

  Workdir w;
  json bad = w.config();
  bad["training"]["gamma_typo"] = 1;
  const Run r = run({"train", "--config", w.write_config(bad)});
  CHECK(r.code == 2);
  CHECK(r.err.find("gamma_typo") != std::string::npos);
}

TEST_CASE("missing files exit with 1 and name the path") {
  Workdir w;
  const std::string cfg = w.write_config(w.config());
  const Run ev = run({"eval", "--config", cfg, "--checkpoint", w.path("nope.ckpt"), "--input",
                      w.path("valid.jsonl")});
  CHECK(ev.code == 1);
  CHECK(ev.err.find("nope.ckpt") != std::string::npos);

  const Run cf = run({"train", "--config", w.path("absent.json")});
  CHECK(cf.code == 1);
  CHECK(cf.err.find("absent.json") != std::string::npos);

  const Run gq = run({"genq", "--corpus", w.path("missing.jsonl")});
  CHECK(gq.code == 1);
  CHECK(gq.err.find("missing.jsonl") != std::string::npos);

  // No checkpoint path anywhere is a configuration problem.
  CHECK(run({"train", "--config", cfg}).code == 2);
}

TEST_CASE("genq") {
  Workdir w;
  const Run r = run({"genq", "--corpus", w.path("train.jsonl"), "--k", "2", "--seed", "3"});
  REQUIRE(r.code == 0);
  const auto rows = jsonl(r.out);
  REQUIRE(rows.size() == 12);
  for (const auto& row : rows) {
    const std::string q = row.at("question");
    CHECK(q.find("___") != std::string::npos);
    CHECK(row.at("k").get<int>() < 2);
    CHECK(!row.at("answer").get<std::string>().empty());
  }
  CHECK(run({"genq", "--corpus", w.path("train.jsonl"), "--k", "2", "--seed", "3"}).out == r.out);

  const Run kw = run({"genq", "--corpus", w.path("train.jsonl"), "--mode", "keyword",
                      "--output", w.path("q/keyword.jsonl")});
  REQUIRE(kw.code == 0);
  CHECK(jsonl(read_file(w.path("q/keyword.jsonl"))).size() == 6);
}

TEST_CASE("prep fills in missing annotations") {
  TempDir dir("prep");
  write_file(dir / "raw.jsonl",
             R"({"id": "a", "source": [["Obama", "visited", "Kenya", "today"]], "abstract": [["Obama", "visited", "Kenya"]]})"
             "\n");
  const Run r = run({"prep", "--input", (dir / "raw.jsonl").string()});
  REQUIRE(r.code == 0);
  const auto rows = jsonl(r.out);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].at("entities").size() == 1);
  CHECK(rows[0].at("roots").size() == 1);
  CHECK(!rows[0].at("entities")[0].empty());

  write_file(dir / "broken.jsonl", "{\"id\": \"a\"}\n");
  const Run b = run({"prep", "--input", (dir / "broken.jsonl").string()});
  CHECK(b.code == 1);
  CHECK(b.err.find("broken.jsonl:1") != std::string::npos);
}

TEST_CASE("pretrain, train, summarize and eval") {
  Workdir w;
  const std::string cfg = w.write_config(w.config());
  REQUIRE(run({"pretrain", "--config", cfg, "--checkpoint", w.path("pre.ckpt")}).code == 0);
  const Run tr = run({"train", "--config", cfg, "--init", w.path("pre.ckpt"), "--checkpoint",
                      w.path("model.ckpt")});
  INFO(tr.err);
  REQUIRE(tr.code == 0);
  REQUIRE(std::filesystem::exists(w.path("model.ckpt")));

  const Run sm = run({"summarize", "--config", cfg, "--checkpoint", w.path("model.ckpt"),
                      "--input", w.path("valid.jsonl")});
  REQUIRE(sm.code == 0);
  const auto rows = jsonl(sm.out);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    const auto mask = row.at("mask").get<std::vector<int>>();
    std::size_t on = 0;
    for (int v : mask) on += static_cast<std::size_t>(v);
    std::size_t covered = 0;
    for (const auto& seg : row.at("segments")) covered += seg[1].get<std::size_t>() - seg[0].get<std::size_t>();
    CHECK(covered == on);
    CHECK(row.at("id").get<std::string>().rfind("synth-", 0) == 0);
  }

  const Run ev = run({"eval", "--config", cfg, "--checkpoint", w.path("model.ckpt"), "--input",
                      w.path("valid.jsonl"), "--report", w.path("report.json")});
  REQUIRE(ev.code == 0);
  const json report = json::parse(read_file(w.path("report.json")));
  CHECK(report.at("documents").size() == 3);
  CHECK(report.at("corpus").at("count") == 3);
  const double acc = report.at("corpus").at("qa_accuracy");
  CHECK(acc >= 0.0);
  CHECK(acc <= 1.0);
  CHECK(report.at("documents")[0].contains("rougeL"));

  // A checkpoint from a different architecture is refused.
  json other = w.config();
  other["model"]["doc_hidden"] = 4;
  const Run mismatch = run({"eval", "--config", w.write_config(other, "other.json"), "--checkpoint",
                            w.path("model.ckpt"), "--input", w.path("valid.jsonl")});
  CHECK(mismatch.code == 1);
}

TEST_CASE("seed precedence") {
  Workdir w;
  auto train = [&](std::uint64_t config_seed, const std::vector<std::string>& extra,
                   const std::string& name) {
    std::vector<std::string> args{"train", "--config",
                                  w.write_config(w.config(config_seed), name + ".json"),
                                  "--checkpoint", w.path(name + ".ckpt")};
    args.insert(args.end(), extra.begin(), extra.end());
    REQUIRE(run(args).code == 0);
    return read_file(w.path(name + ".ckpt"));
  };
  ::unsetenv("QASUMM_SEED");
  const std::string base = train(3, {}, "base");
  CHECK(train(3, {}, "again") == base);
  CHECK(train(4, {}, "different") != base);
  CHECK(train(4, {"--seed", "3"}, "flag") == base);

  ::setenv("QASUMM_SEED", "3", 1);
  CHECK(train(4, {}, "env") == base);
  ::setenv("QASUMM_SEED", "9", 1);
  CHECK(train(4, {"--seed", "3"}, "flag_over_env") == base);
  ::setenv("QASUMM_SEED", "banana", 1);
  CHECK(run({"train", "--config", w.write_config(w.config(), "b.json"), "--checkpoint",
             w.path("b.ckpt")}).code == 2);
  ::unsetenv("QASUMM_SEED");
}
