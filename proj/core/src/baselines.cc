#include "ersearch/baselines.h"

#include <algorithm>

#include "ersearch/error.h"

namespace ersearch {

namespace {

void RequirePairQuery(const ERQuery &query, std::string_view model) {
  if (query.size() != 3) {
    throw ValidationError(std::string(model) + " needs a query of three sub-queries, got " +
                          std::to_string(query.size()));
  }
}

std::vector<std::string> Concat(std::initializer_list<std::span<const std::string>> parts) {
  std::vector<std::string> out;
  for (auto p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// Keeps the first n documents plus any tied with the n-th. In a cross
// product a document below that cut is beaten by at least n - 1 distinct
// pairs sharing its partner, so n = max_results + 2 loses nothing.
void CutWithTies(RankedList &list, std::size_t n) {
  if (list.docs.size() <= n) return;
  const double cut = list.docs[n - 1].score;
  while (n < list.docs.size() && list.docs[n].score == cut) ++n;
  list.docs.resize(n);
}

CandidateTuple MakePair(const EntityId &a, const EntityId &b, double sa, double sb) {
  CandidateTuple t;
  t.entities = {a, b};
  t.pairs = {EntityPair(a, b)};
  t.subquery_scores = {sa, sb};
  t.score = sa + sb;
  return t;
}

}  // namespace

RankedList RankDocumentsSdm(const MetaIndex &part, std::span<const std::string> terms,
                            const RetrievalParams &params) {
  RankedList list{&part, {}};
  const SubQueryScorer scorer(part, terms, params.text);
  const auto &w = params.sdm_weights;
  for (DocId d : scorer.MatchingDocuments()) {
    const TextFeatures f = scorer.Features(d);
    list.docs.push_back({d, w[0] * f.unigram + w[1] * f.ordered + w[2] * f.unordered});
  }
  std::sort(list.docs.begin(), list.docs.end(), [](const auto &a, const auto &b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc < b.doc;
  });
  return list;
}

std::vector<CandidateTuple> BaseEE(const ERQuery &query, const ERIndex &index,
                                   const RetrievalParams &params) {
  RequirePairQuery(query, "base-ee");
  const auto &e1 = query.entity(0).terms, &rel = query.relationship(0).terms,
             &e2 = query.entity(1).terms;
  RankedList left = RankDocumentsSdm(index.entities(), Concat({e1, rel}), params);
  RankedList right = RankDocumentsSdm(index.entities(), Concat({rel, e2}), params);
  CutWithTies(left, params.max_results + 2);
  CutWithTies(right, params.max_results + 2);
  std::vector<CandidateTuple> tuples;
  for (std::size_t i = 0; i < left.docs.size(); ++i) {
    for (std::size_t j = 0; j < right.docs.size(); ++j) {
      if (left.key(i) == right.key(j)) continue;
      tuples.push_back(MakePair(left.key(i), right.key(j), left.docs[i].score,
                                right.docs[j].score));
    }
  }
  return RankTuples(std::move(tuples), params.max_results);
}

std::vector<CandidateTuple> BaseE(const ERQuery &query, const ERIndex &index,
                                  const RetrievalParams &params) {
  RequirePairQuery(query, "base-e");
  const auto terms = Concat({query.entity(0).terms, query.relationship(0).terms,
                             query.entity(1).terms});
  RankedList list = RankDocumentsSdm(index.entities(), terms, params);
  CutWithTies(list, params.max_results + 2);
  std::vector<CandidateTuple> tuples;
  for (std::size_t i = 0; i < list.docs.size(); ++i) {
    for (std::size_t j = i + 1; j < list.docs.size(); ++j) {
      auto a = i, b = j;
      if (list.key(b) < list.key(a)) std::swap(a, b);
      tuples.push_back(
          MakePair(list.key(a), list.key(b), list.docs[a].score, list.docs[b].score));
    }
  }
  return RankTuples(std::move(tuples), params.max_results);
}

std::vector<CandidateTuple> BaseR(const ERQuery &query, const ERIndex &index,
                                  const RetrievalParams &params) {
  RequirePairQuery(query, "base-r");
  const auto terms = Concat({query.entity(0).terms, query.relationship(0).terms,
                             query.entity(1).terms});
  RankedList list = RankDocumentsSdm(index.sentence_pairs(), terms, params);
  if (list.docs.size() > params.max_results) list.docs.resize(params.max_results);
  std::vector<CandidateTuple> tuples;
  for (const auto &d : list.docs) {
    const EntityPair &pair = index.sentence_pair(d.doc);
    CandidateTuple t;
    t.entities = {pair.first(), pair.second()};
    t.pairs = {pair};
    t.subquery_scores = {d.score};
    t.score = d.score;
    tuples.push_back(std::move(t));
  }
  return RankTuples(std::move(tuples), params.max_results);
}

}  // namespace ersearch
