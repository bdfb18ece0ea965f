#ifndef ERSEARCH_EVAL_H_
#define ERSEARCH_EVAL_H_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ersearch/retrieval.h"

namespace ersearch {

// Relevance judgments. Tuple keys are stored canonicalized.
class Qrels {
 public:
  // Later judgments of the same tuple replace earlier ones.
  void Add(const std::string &query_id, std::string_view tuple_key, int grade);

  bool contains(const std::string &query_id) const { return judgments_.count(query_id) > 0; }
  // 0 for unjudged tuples.
  int grade(const std::string &query_id, std::string_view tuple_key) const;
  // Tuples with grade > 0.
  std::size_t relevant_count(const std::string &query_id) const;
  const std::map<std::string, int> *judgments(const std::string &query_id) const;

  std::vector<std::string> query_ids() const;
  const std::map<std::string, std::map<std::string, int>> &all() const { return judgments_; }
  bool empty() const { return judgments_.empty(); }

  bool operator==(const Qrels &) const = default;

 private:
  std::map<std::string, std::map<std::string, int>> judgments_;
};

// "query_id 0 tuple_key grade" per line; blank lines are skipped.
Qrels ReadQrels(std::istream &in, const std::string &source = "<stream>");
Qrels LoadQrels(const std::string &path);
void WriteQrels(std::ostream &out, const Qrels &qrels);

struct RunEntry {
  std::string tuple_key;
  double score = 0.0;

  bool operator==(const RunEntry &) const = default;
};

struct RunResult {
  std::map<std::string, std::vector<RunEntry>> queries;  // rank order

  void Add(const std::string &query_id, std::span<const CandidateTuple> tuples);
  bool operator==(const RunResult &) const = default;
};

// "query_id Q0 tuple_key rank score tag" per line, queries in id order.
// Scores are written in shortest round-trip form.
void WriteRun(std::ostream &out, const RunResult &run, std::string_view tag);
void SaveRun(const std::string &path, const RunResult &run, std::string_view tag);
// Validates contiguous ranks from 1 and non-increasing scores per query.
RunResult ReadRun(std::istream &in, const std::string &source = "<stream>");
RunResult LoadRun(const std::string &path);

struct QueryMetrics {
  std::string query_id;
  double map = 0.0;  // average precision at 100
  double p10 = 0.0;
  double mrr = 0.0;
  double ndcg20 = 0.0;
};

// Metric primitives over the grades of a ranked list (duplicates removed).
// relevant is the number of relevant tuples; ideal lists their grades.
double AveragePrecision(std::span<const int> ranked, std::size_t relevant,
                        std::size_t depth = 100);
double PrecisionAt(std::span<const int> ranked, std::size_t k);
double ReciprocalRank(std::span<const int> ranked, std::size_t depth = 100);
double Ndcg(std::span<const int> ranked, std::vector<int> ideal, std::size_t k = 20);

// Grades of the run's ranking for one query: canonical duplicates count once
// at their first rank, and the list is cut at 100.
std::vector<int> RankedGrades(std::span<const RunEntry> entries,
                              const std::map<std::string, int> *judgments);

QueryMetrics EvaluateQuery(const std::string &query_id, std::span<const RunEntry> entries,
                           const Qrels &qrels);

struct EvalOptions {
  // Evaluate only the queries present in the run. By default every judged
  // query counts and a query absent from the run scores 0.
  bool run_queries_only = false;
};

// Per-query metrics in query id order. Throws ValidationError when the run
// holds a query without judgments.
std::vector<QueryMetrics> Evaluate(const RunResult &run, const Qrels &qrels,
                                   const EvalOptions &options = {});
QueryMetrics MacroAverage(std::span<const QueryMetrics> per_query);

}  // namespace ersearch

#endif  // ERSEARCH_EVAL_H_
