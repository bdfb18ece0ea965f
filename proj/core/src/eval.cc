#include "ersearch/eval.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "ersearch/error.h"
#include "ersearch/tuple_key.h"

namespace ersearch {

namespace {

std::vector<std::string> Fields(const std::string &line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string f; in >> f;) out.push_back(std::move(f));
  return out;
}

template <typename T>
bool ParseNumber(const std::string &s, T &out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string FormatScore(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

bool Blank(const std::string &line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

void Qrels::Add(const std::string &query_id, std::string_view tuple_key, int grade) {
  judgments_[query_id][CanonicalTupleKey(tuple_key)] = grade;
}

int Qrels::grade(const std::string &query_id, std::string_view tuple_key) const {
  const auto *j = judgments(query_id);
  if (!j) return 0;
  auto it = j->find(CanonicalTupleKey(tuple_key));
  return it == j->end() ? 0 : it->second;
}

std::size_t Qrels::relevant_count(const std::string &query_id) const {
  const auto *j = judgments(query_id);
  if (!j) return 0;
  return std::count_if(j->begin(), j->end(), [](const auto &kv) { return kv.second > 0; });
}

const std::map<std::string, int> *Qrels::judgments(const std::string &query_id) const {
  auto it = judgments_.find(query_id);
  return it == judgments_.end() ? nullptr : &it->second;
}

std::vector<std::string> Qrels::query_ids() const {
  std::vector<std::string> ids;
  for (const auto &[q, _] : judgments_) ids.push_back(q);
  return ids;
}

Qrels ReadQrels(std::istream &in, const std::string &source) {
  Qrels qrels;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (Blank(line)) continue;
    const auto f = Fields(line);
    int grade = 0;
    if (f.size() != 4 || !ParseNumber(f[3], grade)) {
      throw ParseError(source, n, "expected 'query_id 0 tuple_key grade'");
    }
    if (SplitTupleKey(f[2]).size() < 1) throw ParseError(source, n, "empty tuple key");
    qrels.Add(f[0], f[2], grade);
  }
  return qrels;
}

Qrels LoadQrels(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open qrels file " + path);
  return ReadQrels(in, path);
}

void WriteQrels(std::ostream &out, const Qrels &qrels) {
  for (const auto &[q, judged] : qrels.all()) {
    for (const auto &[key, grade] : judged) out << q << " 0 " << key << ' ' << grade << '\n';
  }
}

void RunResult::Add(const std::string &query_id, std::span<const CandidateTuple> tuples) {
  auto &entries = queries[query_id];
  for (const auto &t : tuples) entries.push_back({t.key(), t.score});
}

void WriteRun(std::ostream &out, const RunResult &run, std::string_view tag) {
  for (const auto &[q, entries] : run.queries) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      out << q << " Q0 " << entries[i].tuple_key << ' ' << i + 1 << ' '
          << FormatScore(entries[i].score) << ' ' << tag << '\n';
    }
  }
}

void SaveRun(const std::string &path, const RunResult &run, std::string_view tag) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write run file " + path);
  WriteRun(out, run, tag);
  if (!out) throw Error("failed writing run file " + path);
}

RunResult ReadRun(std::istream &in, const std::string &source) {
  RunResult run;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (Blank(line)) continue;
    const auto f = Fields(line);
    std::size_t rank = 0;
    double score = 0;
    if (f.size() != 6 || f[1] != "Q0" || !ParseNumber(f[3], rank) ||
        !ParseNumber(f[4], score)) {
      throw ParseError(source, n, "expected 'query_id Q0 tuple_key rank score tag'");
    }
    auto &entries = run.queries[f[0]];
    if (rank != entries.size() + 1) {
      throw ParseError(source, n, "rank " + f[3] + " breaks the contiguous ranking");
    }
    if (!entries.empty() && score > entries.back().score) {
      throw ParseError(source, n, "score increases with rank");
    }
    entries.push_back({f[2], score});
  }
  return run;
}

RunResult LoadRun(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open run file " + path);
  return ReadRun(in, path);
}

double AveragePrecision(std::span<const int> ranked, std::size_t relevant,
                        std::size_t depth) {
  if (relevant == 0) return 0.0;
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < std::min(depth, ranked.size()); ++i) {
    if (ranked[i] > 0) sum += static_cast<double>(++hits) / static_cast<double>(i + 1);
  }
  return sum / static_cast<double>(relevant);
}

double PrecisionAt(std::span<const int> ranked, std::size_t k) {
  const auto n = std::min(k, ranked.size());
  const auto hits = std::count_if(ranked.begin(), ranked.begin() + n, [](int g) { return g > 0; });
  return static_cast<double>(hits) / static_cast<double>(k);
}

double ReciprocalRank(std::span<const int> ranked, std::size_t depth) {
  for (std::size_t i = 0; i < std::min(depth, ranked.size()); ++i) {
    if (ranked[i] > 0) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

double Ndcg(std::span<const int> ranked, std::vector<int> ideal, std::size_t k) {
  auto dcg = [k](auto begin, auto end) {
    double s = 0.0;
    std::size_t i = 0;
    for (auto it = begin; it != end && i < k; ++it, ++i) {
      if (*it > 0) s += *it / std::log2(static_cast<double>(i + 2));
    }
    return s;
  };
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const double best = dcg(ideal.begin(), ideal.end());
  return best > 0 ? dcg(ranked.begin(), ranked.end()) / best : 0.0;
}

std::vector<int> RankedGrades(std::span<const RunEntry> entries,
                              const std::map<std::string, int> *judgments) {
  std::vector<int> grades;
  std::unordered_set<std::string> seen;
  for (const auto &e : entries) {
    if (grades.size() == 100) break;
    std::string key = CanonicalTupleKey(e.tuple_key);
    if (!seen.insert(key).second) continue;
    int g = 0;
    if (judgments) {
      auto it = judgments->find(key);
      if (it != judgments->end()) g = it->second;
    }
    grades.push_back(g);
  }
  return grades;
}

QueryMetrics EvaluateQuery(const std::string &query_id, std::span<const RunEntry> entries,
                           const Qrels &qrels) {
  QueryMetrics m;
  m.query_id = query_id;
  const auto *judged = qrels.judgments(query_id);
  const std::size_t relevant = qrels.relevant_count(query_id);
  if (relevant == 0) return m;
  const auto grades = RankedGrades(entries, judged);
  std::vector<int> ideal;
  for (const auto &[_, g] : *judged) {
    if (g > 0) ideal.push_back(g);
  }
  m.map = AveragePrecision(grades, relevant);
  m.p10 = PrecisionAt(grades, 10);
  m.mrr = ReciprocalRank(grades);
  m.ndcg20 = Ndcg(grades, std::move(ideal));
  return m;
}

std::vector<QueryMetrics> Evaluate(const RunResult &run, const Qrels &qrels,
                                   const EvalOptions &options) {
  for (const auto &[q, _] : run.queries) {
    if (!qrels.contains(q)) throw ValidationError("run query '" + q + "' has no judgments");
  }
  std::vector<QueryMetrics> out;
  if (options.run_queries_only) {
    for (const auto &[q, entries] : run.queries) out.push_back(EvaluateQuery(q, entries, qrels));
    return out;
  }
  for (const auto &q : qrels.query_ids()) {
    auto it = run.queries.find(q);
    if (it == run.queries.end()) {
      out.push_back(EvaluateQuery(q, {}, qrels));
    } else {
      out.push_back(EvaluateQuery(q, it->second, qrels));
    }
  }
  return out;
}

QueryMetrics MacroAverage(std::span<const QueryMetrics> per_query) {
  QueryMetrics m;
  m.query_id = "all";
  // Running mean: identical inputs average to exactly themselves.
  double n = 0;
  for (const auto &q : per_query) {
    n += 1;
    m.map += (q.map - m.map) / n;
    m.p10 += (q.p10 - m.p10) / n;
    m.mrr += (q.mrr - m.mrr) / n;
    m.ndcg20 += (q.ndcg20 - m.ndcg20) / n;
  }
  return m;
}

}  // namespace ersearch
