#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "builders.h"
#include "ersearch/collection_builder.h"
#include "ersearch/eval.h"
#include "ersearch/ltr.h"
#include "ersearch/query.h"
#include "ersearch_cli/cli.h"
#include "json.hpp"

namespace ersearch {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("ersearch_cli_" + std::to_string(::getpid()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  std::string Path(const std::string &name) const { return (root_ / name).string(); }

  int Cli(std::vector<std::string> args) {
    args.insert(args.begin(), "ersearch");
    out_.str("");
    err_.str("");
    return cli::Run(args, out_, err_);
  }

  static std::string Slurp(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void WriteToyFiles() {
    SaveCorpus(Path("corpus.jsonl"), testing::ToyCorpus());
    const std::vector<ERQuery> queries = {
        ParseInlineQuery("toy", "soccer player | dated | top model"),
        ParseInlineQuery("solo", "soccer player")};
    std::ofstream q(Path("queries.json"));
    WriteQueries(q, queries);
    std::ofstream r(Path("qrels.txt"));
    r << "toy 0 Cristiano_Ronaldo|Irina_Shayik 1\ntoy 0 Luis_Figo|Helen_Svedin 1\n"
         "solo 0 Lionel_Messi 1\n";
  }

  fs::path root_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, BatchSearchThenEvaluateMatchesLibrary) {
  WriteToyFiles();
  ASSERT_EQ(Cli({"build-index", "--corpus", Path("corpus.jsonl"), "--index", Path("idx"),
                 "--mu-entity", "1500"}),
            0)
      << err_.str();
  ASSERT_EQ(Cli({"batch-search", "--index", Path("idx"), "--queries", Path("queries.json"),
                 "--run", Path("ef.run")}),
            0)
      << err_.str();
  ASSERT_EQ(Cli({"evaluate", "--run", Path("ef.run"), "--qrels", Path("qrels.txt"), "--json",
                 Path("m.json")}),
            0)
      << err_.str();
  const auto printed = nlohmann::json::parse(Slurp(Path("m.json")));
  const auto macro = MacroAverage(Evaluate(LoadRun(Path("ef.run")), LoadQrels(Path("qrels.txt"))));
  EXPECT_EQ(printed["map"].get<double>(), macro.map);
  EXPECT_EQ(printed["queries"].get<int>(), 2);
  // Ronaldo-Irina first, Figo-Helen second; Messi first for the single query.
  EXPECT_DOUBLE_EQ(macro.map, 1.0);

  ASSERT_EQ(Cli({"search", "--index", Path("idx"), "soccer player"}), 0);
  EXPECT_EQ(out_.str().substr(0, 15), "1\tLionel_Messi\t");
  ASSERT_EQ(Cli({"stats", "--index", Path("idx")}), 0);
  EXPECT_EQ(nlohmann::json::parse(out_.str())["entity"]["mu"].get<double>(), 1500.0);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  WriteToyFiles();
  ASSERT_EQ(Cli({"build-index", "--corpus", Path("corpus.jsonl"), "--index", Path("idx")}), 0);
  EXPECT_EQ(Cli({"search", "--index", Path("idx"), "--model", "bogus", "a"}), cli::kUsage);
  EXPECT_EQ(Cli({"search", "--index", Path("idx"), "--window", "1", "a"}), cli::kUsage);
  EXPECT_EQ(Cli({"frobnicate"}), cli::kUsage);
  EXPECT_EQ(Cli({}), cli::kUsage);
}

TEST_F(CliTest, HelpForEverySubcommand) {
  for (const char *cmd : {"ingest", "build-index", "stats", "search", "batch-search", "train",
                          "evaluate", "build-collection"}) {
    EXPECT_EQ(Cli({cmd, "--help"}), 0) << cmd;
    EXPECT_NE(out_.str().find("--"), std::string::npos) << cmd;
  }
}

TEST_F(CliTest, MissingFilesFailWithAMessage) {
  EXPECT_EQ(Cli({"ingest", "--corpus", Path("none.jsonl")}), cli::kFailure);
  EXPECT_NE(err_.str().find("error: not found"), std::string::npos);
  EXPECT_EQ(Cli({"stats", "--index", Path("none")}), cli::kFailure);
  EXPECT_EQ(Cli({"batch-search", "--index", Path("none"), "--queries", "q", "--run", "r"}),
            cli::kFailure);
  std::ofstream(Path("bad.jsonl")) << "{\"doc_id\": \"d\", \"text\": \n";
  EXPECT_EQ(Cli({"ingest", "--corpus", Path("bad.jsonl")}), cli::kFailure);
  EXPECT_NE(err_.str().find("parse error"), std::string::npos);
}

TEST_F(CliTest, EmptyCorpusGivesEmptyRuns) {
  std::ofstream(Path("empty.jsonl")).close();
  std::ofstream(Path("queries.json")) << R"([{"query_id": "q", "subqueries": [
      {"kind": "entity", "terms": "a"}, {"kind": "relationship", "terms": "b"},
      {"kind": "entity", "terms": "c"}]}])";
  ASSERT_EQ(Cli({"ingest", "--corpus", Path("empty.jsonl")}), 0) << err_.str();
  ASSERT_EQ(Cli({"build-index", "--corpus", Path("empty.jsonl"), "--index", Path("idx")}), 0)
      << err_.str();
  const auto stats = nlohmann::json::parse(out_.str());
  for (const char *part : {"entity", "relationship", "sentence_pair", "document"}) {
    EXPECT_FALSE(stats[part]["mu"].is_null()) << part;
    EXPECT_EQ(stats[part]["doc_count"].get<int>(), 0);
  }
  ASSERT_EQ(Cli({"search", "--index", Path("idx"), "a | b | c"}), 0) << err_.str();
  EXPECT_EQ(out_.str(), "");
  for (const char *model : {"ef", "erdm", "lf", "base-ee", "base-e", "base-r"}) {
    ASSERT_EQ(Cli({"batch-search", "--index", Path("idx"), "--model", model, "--queries",
                   Path("queries.json"), "--run", Path("r.run")}),
              0)
        << model << ": " << err_.str();
    EXPECT_EQ(Slurp(Path("r.run")), "") << model;
  }
}

TEST_F(CliTest, ConfigFileWithFlagsWinning) {
  WriteToyFiles();
  ASSERT_EQ(Cli({"build-index", "--corpus", Path("corpus.jsonl"), "--index", Path("idx")}), 0);
  std::ofstream(Path("cfg.ini")) << "depth = 3\nscorer = \"bm25\"\n";
  ASSERT_EQ(Cli({"--config", Path("cfg.ini"), "search", "--index", Path("idx"), "soccer player"}),
            0)
      << err_.str();
  std::istringstream lines(out_.str());
  int n = 0;
  for (std::string l; std::getline(lines, l);) ++n;
  EXPECT_EQ(n, 3);
  const std::string bm25 = out_.str();
  ASSERT_EQ(Cli({"--config", Path("cfg.ini"), "search", "--index", Path("idx"), "--depth", "1",
                 "soccer player"}),
            0);
  const std::string top = out_.str();
  EXPECT_EQ(std::count(top.begin(), top.end(), '\n'), 1);
  EXPECT_EQ(top, bm25.substr(0, bm25.find('\n') + 1));
  ASSERT_EQ(Cli({"search", "--index", Path("idx"), "--depth", "3", "soccer player"}), 0);
  EXPECT_NE(out_.str(), bm25);
}

TEST_F(CliTest, TrainWritesWeightsUsableBySearch) {
  WriteToyFiles();
  ASSERT_EQ(Cli({"build-index", "--corpus", Path("corpus.jsonl"), "--index", Path("idx")}), 0);
  ASSERT_EQ(Cli({"train", "--index", Path("idx"), "--queries", Path("queries.json"), "--qrels",
                 Path("qrels.txt"), "--out", Path("w.json"), "--folds", "1", "--restarts", "1"}),
            0)
      << err_.str();
  EXPECT_NO_THROW(LoadWeightsFile(Path("w.json")));
  ASSERT_EQ(Cli({"search", "--index", Path("idx"), "--model", "erdm", "--weights", Path("w.json"),
                 "soccer player | dated | top model"}),
            0)
      << err_.str();
  EXPECT_FALSE(out_.str().empty());
}

TEST_F(CliTest, BuildCollectionAndFinalize) {
  std::ofstream(Path("tables.json")) << R"([{"table_id": "albums", "page_title": "Albums",
    "columns": [
      {"header": "Album", "cells": [{"text": "One", "entity_id": "One_album"},
                                    {"text": "Two", "entity_id": "Two_album"}]},
      {"header": "Artist", "cells": [{"text": "Ann Artist", "entity_id": "Ann"},
                                     {"text": "Bob Artist", "entity_id": "Bob"}]}]}])";
  ASSERT_EQ(Cli({"build-collection", "--tables", Path("tables.json"), "--skeletons",
                 Path("sk.json"), "--qrels", Path("qrels.txt")}),
            0)
      << err_.str();
  EXPECT_EQ(LoadQrels(Path("qrels.txt")).relevant_count("albums"), 2u);

  EXPECT_EQ(Cli({"build-collection", "--finalize", Path("sk.json"), "--queries", Path("q.json")}),
            cli::kFailure);
  auto j = nlohmann::json::parse(Slurp(Path("sk.json")));
  j[0]["subqueries"] = {"album", "by", "artist"};
  std::ofstream(Path("sk.json")) << j.dump();
  ASSERT_EQ(Cli({"build-collection", "--finalize", Path("sk.json"), "--queries", Path("q.json")}),
            0)
      << err_.str();
  const auto qs = LoadQueries(Path("q.json"));
  ASSERT_EQ(qs.size(), 1u);
  EXPECT_EQ(qs[0].size(), 3u);
  EXPECT_EQ(Cli({"build-collection", "--tables", Path("tables.json")}), cli::kFailure);
}

}  // namespace
}  // namespace ersearch
