#include "ersearch_cli/cli.h"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "ersearch/collection_builder.h"
#include "ersearch/corpus.h"
#include "ersearch/er_index.h"
#include "ersearch/error.h"
#include "ersearch/eval.h"
#include "ersearch/extraction.h"
#include "ersearch/ltr.h"
#include "ersearch/query.h"
#include "ersearch/retrieval.h"
#include "json.hpp"

namespace ersearch::cli {

namespace {

std::string Num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::ofstream OpenOut(const std::string &path) {
  if (auto parent = std::filesystem::path(path).parent_path(); !parent.empty()) {
    std::filesystem::create_directories(parent);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  return out;
}

// Options shared by every command. They may appear before or after the
// subcommand and in the --config file.
struct Shared {
  std::string index;
  std::string scorer = "lm";
  std::string model = "ef";
  std::size_t k = 20000;
  std::size_t depth = 100;
  double alpha = 0.1;
  double k1 = 1.2;
  double b = 0.75;
  std::uint32_t window = 8;
  std::optional<double> mu_entity, mu_relationship, mu_sentence_pair, mu_document;
  std::size_t max_extractions = 0;
  unsigned threads = 1;
  std::string weights;
  std::uint64_t seed = 42;

  RetrievalParams Params() const {
    RetrievalParams p;
    p.text.family = ParseScorerFamily(scorer);
    p.text.bm25 = {k1, b};
    p.text.window = window;
    p.first_pass_k = k;
    p.max_results = depth;
    p.alpha = alpha;
    p.Validate();
    return p;
  }

  unsigned Threads() const {
    return threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  }

  ERIndex LoadIndex() const {
    if (index.empty()) throw ValidationError("--index is required");
    if (!std::filesystem::is_directory(index)) throw NotFoundError("no index at " + index);
    return ERIndex::Load(index);
  }

  std::optional<WeightsFile> Weights() const {
    if (weights.empty()) return std::nullopt;
    return LoadWeightsFile(weights);
  }
};

void AddShared(CLI::App &app, Shared &s) {
  app.add_option("--index", s.index, "Index directory");
  app.add_option("--scorer", s.scorer, "Scorer family")
      ->check(CLI::IsMember({"lm", "bm25"}));
  app.add_option("--model", s.model, "Ranking model")
      ->check(CLI::IsMember({"ef", "lf", "erdm", "base-ee", "base-e", "base-r"}));
  app.add_option("--k", s.k, "First-pass cut per sub-query")->check(CLI::PositiveNumber);
  app.add_option("--depth", s.depth, "Tuples returned per query")->check(CLI::PositiveNumber);
  app.add_option("--alpha", s.alpha, "Entity/pair compatibility smoothing")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--k1", s.k1, "BM25 k1")->check(CLI::NonNegativeNumber);
  app.add_option("--b", s.b, "BM25 b")->check(CLI::Range(0.0, 1.0));
  app.add_option("--window", s.window, "Unordered window size")->check(CLI::Range(2u, 1000u));
  app.add_option("--mu-entity", s.mu_entity, "Dirichlet prior of the entity index");
  app.add_option("--mu-relationship", s.mu_relationship,
                 "Dirichlet prior of the relationship index");
  app.add_option("--mu-sentence-pair", s.mu_sentence_pair,
                 "Dirichlet prior of the sentence-pair index");
  app.add_option("--mu-document", s.mu_document, "Dirichlet prior of the document index");
  app.add_option("--max-extractions", s.max_extractions,
                 "Cap on extractions per entity or pair (0 = none)");
  app.add_option("--threads", s.threads, "Worker threads (0 = all cores)");
  app.add_option("--weights", s.weights, "ERDM weights file from train");
  app.add_option("--seed", s.seed, "Seed for folds and restarts");
}

int Ingest(const std::string &corpus_path, const std::string &out_path,
           const std::string &dump_path, std::ostream &out) {
  const Corpus corpus = LoadCorpus(corpus_path);
  std::size_t sentences = 0, mentions = 0, entity_ex = 0, pair_ex = 0;
  std::ofstream dump;
  if (!dump_path.empty()) dump = OpenOut(dump_path);
  for (const auto &doc : corpus) {
    const auto segs = SegmentSentences(doc);
    const auto ents = ExtractEntityContexts(doc, segs);
    const auto pairs = ExtractRelationshipContexts(doc, segs);
    sentences += segs.size();
    mentions += doc.mentions.size();
    entity_ex += ents.size();
    pair_ex += pairs.size();
    if (dump.is_open()) WriteExtractions(dump, ents, pairs);
  }
  if (!out_path.empty()) {
    auto o = OpenOut(out_path);
    WriteCorpus(o, corpus);
  }
  nlohmann::ordered_json j;
  j["documents"] = corpus.size();
  j["sentences"] = sentences;
  j["mentions"] = mentions;
  j["entity_extractions"] = entity_ex;
  j["relationship_extractions"] = pair_ex;
  out << j.dump() << '\n';
  return kOk;
}

int BuildIndex(const Shared &s, const std::string &corpus_path, std::ostream &out) {
  if (s.index.empty()) throw ValidationError("--index is required");
  IndexConfig config;
  config.mu_entity = s.mu_entity;
  config.mu_relationship = s.mu_relationship;
  config.mu_sentence_pair = s.mu_sentence_pair;
  config.mu_document = s.mu_document;
  config.max_extractions_per_key = s.max_extractions;
  config.threads = s.Threads();
  const ERIndex index = ERIndex::Build(LoadCorpus(corpus_path), config);
  index.Save(s.index);
  out << index.StatsJson() << '\n';
  return kOk;
}

// Runs every query; each result slot is written by one worker.
std::vector<std::vector<CandidateTuple>> SearchAll(const Shared &s,
                                                   std::span<const ERQuery> queries,
                                                   const ERIndex &index, bool fold_weights) {
  const RetrievalParams params = s.Params();
  const RankingModel model = ParseModel(s.model);
  const auto weights = s.Weights();
  std::vector<std::vector<CandidateTuple>> results(queries.size());
  auto work = [&](std::size_t i) {
    FeatureWeights w;
    if (weights) w = fold_weights ? weights->ForQuery(queries[i].id()) : weights->weights;
    results[i] = Search(queries[i], index, model, params, w);
  };
  const unsigned threads = std::min<std::size_t>(s.Threads(), std::max<std::size_t>(1, queries.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < queries.size(); ++i) work(i);
    return results;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < queries.size(); i += threads) work(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

int SearchOne(const Shared &s, const std::string &text, const std::string &id,
              std::ostream &out) {
  const ERIndex index = s.LoadIndex();
  const ERQuery query = ParseInlineQuery(id, text);
  const auto results = SearchAll(s, std::span(&query, 1), index, false);
  std::size_t rank = 0;
  for (const auto &t : results[0]) out << ++rank << '\t' << t.key() << '\t' << Num(t.score) << '\n';
  return kOk;
}

int BatchSearch(const Shared &s, const std::string &queries_path, const std::string &run_path,
                std::string tag, bool fold_weights, std::ostream &out) {
  const ERIndex index = s.LoadIndex();
  const auto queries = LoadQueries(queries_path);
  const auto results = SearchAll(s, queries, index, fold_weights);
  RunResult run;
  for (std::size_t i = 0; i < queries.size(); ++i) run.Add(queries[i].id(), results[i]);
  if (tag.empty()) tag = "ersearch-" + s.model + "-" + s.scorer;
  auto o = OpenOut(run_path);
  WriteRun(o, run, tag);
  std::size_t lines = 0;
  for (const auto &r : results) lines += r.size();
  out << "wrote " << lines << " results for " << queries.size() << " queries to " << run_path
      << '\n';
  return kOk;
}

struct TrainOptions {
  std::string queries, qrels, out;
  std::string metric = "map";
  TrainConfig config;
};

int Train(const Shared &s, TrainOptions opt, std::ostream &out, std::ostream &err) {
  const ERIndex index = s.LoadIndex();
  const RetrievalParams params = s.Params();
  const auto queries = LoadQueries(opt.queries);
  const Qrels qrels = LoadQrels(opt.qrels);
  opt.config.metric = ParseTrainMetric(opt.metric);
  opt.config.seed = s.seed;
  opt.config.threads = s.Threads();
  opt.config.Validate();

  std::vector<TrainingQuery> training;
  std::vector<std::string> ids;
  for (const auto &q : queries) {
    if (!qrels.contains(q.id())) {
      err << "warning: query " << q.id() << " has no judgments; skipped\n";
      continue;
    }
    training.push_back(BuildTrainingQuery(q, index, qrels, params));
    ids.push_back(q.id());
  }
  WeightsFile file;
  file.metric = opt.config.metric;
  file.seed = s.seed;
  if (opt.config.fold_count > 1) {
    const FoldPlan plan = MakeFolds(ids, opt.config.fold_count, s.seed);
    for (auto &f : CrossValidate(training, plan, opt.config)) {
      file.folds.push_back({f.test_ids, f.train.weights, f.train.objective});
    }
  }
  const TrainResult all = CoordinateAscent(training, opt.config);
  file.weights = all.weights;
  file.objective = all.objective;
  auto o = OpenOut(opt.out);
  WriteWeightsFile(o, file);
  out << "trained on " << training.size() << " queries; " << TrainMetricName(file.metric)
      << " " << Num(file.objective) << '\n';
  return kOk;
}

int EvaluateCmd(const std::string &run_path, const std::string &qrels_path, bool run_only,
                const std::string &json_path, std::ostream &out) {
  const RunResult run = LoadRun(run_path);
  const Qrels qrels = LoadQrels(qrels_path);
  const auto per_query = Evaluate(run, qrels, {run_only});
  out << "query_id\tmap\tp10\tmrr\tndcg20\n";
  for (const auto &m : per_query) {
    out << m.query_id << '\t' << Num(m.map) << '\t' << Num(m.p10) << '\t' << Num(m.mrr) << '\t'
        << Num(m.ndcg20) << '\n';
  }
  const QueryMetrics macro = MacroAverage(per_query);
  nlohmann::ordered_json j;
  j["queries"] = per_query.size();
  j["map"] = macro.map;
  j["p10"] = macro.p10;
  j["mrr"] = macro.mrr;
  j["ndcg20"] = macro.ndcg20;
  out << j.dump() << '\n';
  if (!json_path.empty()) {
    auto o = OpenOut(json_path);
    o << j.dump(2) << '\n';
  }
  return kOk;
}

struct CollectionArgs {
  std::string tables, skeletons, qrels, finalize, queries;
  CollectionOptions options;
  std::optional<std::uint64_t> shuffle_seed;
};

int BuildCollectionCmd(CollectionArgs a, std::ostream &out) {
  if (!a.finalize.empty()) {
    if (a.queries.empty()) throw ValidationError("--finalize needs --queries");
    std::ifstream in(a.finalize);
    if (!in) throw NotFoundError("cannot open skeletons file " + a.finalize);
    const auto queries = FinalizeSkeletons(ReadSkeletons(in, a.finalize));
    auto o = OpenOut(a.queries);
    WriteQueries(o, queries);
    out << "wrote " << queries.size() << " queries to " << a.queries << '\n';
    return kOk;
  }
  if (a.tables.empty() || a.skeletons.empty() || a.qrels.empty()) {
    throw ValidationError("build-collection needs --tables, --skeletons and --qrels");
  }
  a.options.shuffle_seed = a.shuffle_seed;
  const auto tables = LoadTables(a.tables);
  const Collection c = BuildCollection(tables, a.options);
  {
    auto o = OpenOut(a.skeletons);
    WriteSkeletons(o, c.skeletons);
  }
  {
    auto o = OpenOut(a.qrels);
    WriteQrels(o, c.qrels);
  }
  out << "tables " << tables.size() << ", skeletons " << c.skeletons.size() << ", skipped "
      << c.skipped.size() << '\n';
  return kOk;
}

}  // namespace

int Run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Entity-relationship retrieval toolkit", "ersearch"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Key = value configuration file; flags win");
  Shared s;
  AddShared(app, s);

  std::string corpus, corpus_out, dump;
  auto *ingest = app.add_subcommand("ingest", "Validate a corpus and report extraction counts");
  ingest->add_option("--corpus", corpus, "Corpus JSONL")->required();
  ingest->add_option("--out", corpus_out, "Write the normalized corpus");
  ingest->add_option("--dump-extractions", dump, "Write extractions as JSON Lines");

  auto *build = app.add_subcommand("build-index", "Build the indexes from a corpus");
  build->add_option("--corpus", corpus, "Corpus JSONL")->required();

  app.add_subcommand("stats", "Print collection statistics as JSON");

  std::string query_text, query_id = "q";
  auto *search = app.add_subcommand("search", "Rank tuples for one query");
  search->add_option("query,--query", query_text, "Sub-queries separated by '|'")->required();
  search->add_option("--query-id", query_id, "Query id");

  std::string queries_path, run_path, tag;
  bool fold_weights = false;
  auto *batch = app.add_subcommand("batch-search", "Rank tuples for a query file");
  batch->add_option("--queries", queries_path, "Query file")->required();
  batch->add_option("--run", run_path, "Output run file")->required();
  batch->add_option("--tag", tag, "Run tag");
  batch->add_flag("--fold-weights", fold_weights,
                  "Use each query's held-out fold weights from the weights file");

  TrainOptions topt;
  auto *train = app.add_subcommand("train", "Learn ERDM weights by coordinate ascent");
  train->add_option("--queries", topt.queries, "Query file")->required();
  train->add_option("--qrels", topt.qrels, "Relevance judgments")->required();
  train->add_option("--out", topt.out, "Output weights JSON")->required();
  train->add_option("--metric", topt.metric, "map or ndcg@20")
      ->check(CLI::IsMember({"map", "ndcg@20"}));
  train->add_option("--folds", topt.config.fold_count, "Cross-validation folds (1 = none)");
  train->add_option("--restarts", topt.config.restarts, "Coordinate ascent restarts");
  train->add_option("--max-sweeps", topt.config.max_sweeps, "Sweeps per restart");
  train->add_option("--epsilon", topt.config.epsilon, "Convergence threshold");

  std::string qrels_path, json_path;
  bool run_only = false;
  auto *evaluate = app.add_subcommand("evaluate", "Score a run against judgments");
  evaluate->add_option("--run", run_path, "Run file")->required();
  evaluate->add_option("--qrels", qrels_path, "Relevance judgments")->required();
  evaluate->add_flag("--run-queries-only", run_only, "Ignore judged queries absent from the run");
  evaluate->add_option("--json", json_path, "Also write the macro averages here");

  CollectionArgs cargs;
  auto *collection =
      app.add_subcommand("build-collection", "Derive query skeletons and judgments from tables");
  collection->add_option("--tables", cargs.tables, "Tables JSON");
  collection->add_option("--skeletons", cargs.skeletons, "Output skeletons JSON");
  collection->add_option("--qrels", cargs.qrels, "Output judgments");
  collection->add_option("--similarity", cargs.options.similarity_threshold,
                         "Maximum title Jaccard between admitted tables");
  collection->add_option("--key-threshold", cargs.options.key_threshold,
                         "Minimum key column uniqueness");
  collection->add_option("--arity", cargs.options.arity, "Columns per tuple");
  collection->add_option("--shuffle-seed", cargs.shuffle_seed, "Shuffle tables before sampling");
  collection->add_option("--finalize", cargs.finalize,
                         "Turn editor-completed skeletons into a query file");
  collection->add_option("--queries", cargs.queries, "Output query file for --finalize");

  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*ingest) return Ingest(corpus, corpus_out, dump, out);
    if (*build) return BuildIndex(s, corpus, out);
    if (app.got_subcommand("stats")) {
      out << s.LoadIndex().StatsJson() << '\n';
      return kOk;
    }
    if (*search) return SearchOne(s, query_text, query_id, out);
    if (*batch) return BatchSearch(s, queries_path, run_path, tag, fold_weights, out);
    if (*train) return Train(s, topt, out, err);
    if (*evaluate) return EvaluateCmd(run_path, qrels_path, run_only, json_path, out);
    if (*collection) return BuildCollectionCmd(cargs, out);
  } catch (const ParseError &e) {
    err << "error: parse error: " << e.what() << '\n';
    return kFailure;
  } catch (const NotFoundError &e) {
    err << "error: not found: " << e.what() << '\n';
    return kFailure;
  } catch (const ValidationError &e) {
    err << "error: invalid input: " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

int Run(int argc, char **argv, std::ostream &out, std::ostream &err) {
  return Run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace ersearch::cli
