#include "ersearch/retrieval.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>
#include <unordered_set>

#include "ersearch/baselines.h"
#include "ersearch/error.h"
#include "ersearch/late_fusion.h"
#include "ersearch/tuple_key.h"

namespace ersearch {

namespace {

constexpr std::string_view kFeatureNames[kFeatureCount] = {
    "E_T", "E_O", "E_U", "R_T", "R_O", "R_U", "ER_S", "RER_S"};

bool RanksBefore(const RankedDocument &a, const RankedDocument &b) {
  // DocIds follow key order, so the id breaks ties by key.
  if (a.score != b.score) return a.score > b.score;
  return a.doc < b.doc;
}

void Accumulate(FeatureVector &f, const TextFeatures &t, std::size_t base) {
  f[base] += t.unigram;
  f[base + 1] += t.ordered;
  f[base + 2] += t.unordered;
}

// Lazily evaluated feature cache for one ranked list.
class ListFeatures {
 public:
  ListFeatures(const RankedList &list, std::span<const std::string> terms,
               const TextScoringParams &params)
      : list_(&list), scorer_(*list.part, terms, params), cache_(list.docs.size()) {}

  const TextFeatures &at(std::size_t pos) {
    if (!cache_[pos]) cache_[pos] = scorer_.Features(list_->docs[pos].doc);
    return *cache_[pos];
  }

 private:
  const RankedList *list_;
  SubQueryScorer scorer_;
  std::vector<std::optional<TextFeatures>> cache_;
};

}  // namespace

std::string_view FeatureName(std::size_t feature) { return kFeatureNames[feature]; }

std::size_t ParseFeatureName(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (kFeatureNames[i] == name) return i;
  }
  throw ValidationError("unknown feature '" + std::string(name) + "'");
}

FeatureWeights::FeatureWeights() { lambda_.fill(1.0 / static_cast<double>(kFeatureCount)); }

FeatureWeights::FeatureWeights(const FeatureVector &lambda) {
  double total = 0.0;
  for (double l : lambda) {
    if (!std::isfinite(l) || l < 0) {
      throw ValidationError("feature weights must be finite and non-negative");
    }
    total += l;
  }
  if (total <= 0) throw ValidationError("feature weights must not all be zero");
  for (std::size_t i = 0; i < kFeatureCount; ++i) lambda_[i] = lambda[i] / total;
}

FeatureWeights FeatureWeights::UnigramOnly() {
  FeatureVector v{};
  v[kEntityUnigram] = 0.5;
  v[kRelationshipUnigram] = 0.5;
  return FeatureWeights(v);
}

double FeatureWeights::Score(const FeatureVector &features) const {
  double s = 0.0;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (lambda_[i] != 0) s += lambda_[i] * features[i];
  }
  return s;
}

std::string_view ModelName(RankingModel model) {
  switch (model) {
    case RankingModel::kEarlyFusion: return "ef";
    case RankingModel::kLateFusion: return "lf";
    case RankingModel::kERDM: return "erdm";
    case RankingModel::kBaseEE: return "base-ee";
    case RankingModel::kBaseE: return "base-e";
    case RankingModel::kBaseR: return "base-r";
  }
  return "";
}

RankingModel ParseModel(std::string_view name) {
  for (auto m : {RankingModel::kEarlyFusion, RankingModel::kLateFusion, RankingModel::kERDM,
                 RankingModel::kBaseEE, RankingModel::kBaseE, RankingModel::kBaseR}) {
    if (ModelName(m) == name) return m;
  }
  throw ValidationError("unknown model '" + std::string(name) +
                        "' (expected ef, lf, erdm, base-ee, base-e or base-r)");
}

void RetrievalParams::Validate() const {
  if (first_pass_k < 1) throw ValidationError("k must be >= 1");
  if (max_results < 1) throw ValidationError("max results must be >= 1");
  if (!(alpha >= 0 && alpha <= 1)) throw ValidationError("alpha must lie in [0, 1]");
  if (text.window < 2) throw ValidationError("window must be >= 2");
  if (!(text.bm25.k1 >= 0)) throw ValidationError("k1 must be >= 0");
  if (!(text.bm25.b >= 0 && text.bm25.b <= 1)) throw ValidationError("b must lie in [0, 1]");
  double total = 0;
  for (double w : sdm_weights) {
    if (!(w >= 0)) throw ValidationError("SDM weights must be non-negative");
    total += w;
  }
  if (total <= 0) throw ValidationError("SDM weights must not all be zero");
}

RankedList RankDocuments(const MetaIndex &part, std::span<const std::string> terms,
                         const TextScoringParams &params, std::size_t k) {
  RankedList list{&part, {}};
  const SubQueryScorer scorer(part, terms, params);
  for (DocId d : scorer.MatchingDocuments()) list.docs.push_back({d, scorer.Unigram(d)});
  const std::size_t keep = std::min(k, list.docs.size());
  std::partial_sort(list.docs.begin(), list.docs.begin() + keep, list.docs.end(), RanksBefore);
  list.docs.resize(keep);
  return list;
}

CandidateLists GenerateCandidates(const ERQuery &query, const ERIndex &index,
                                  const RetrievalParams &params) {
  CandidateLists lists;
  for (std::size_t i = 0; i < query.arity(); ++i) {
    lists.entities.push_back(RankDocuments(index.entities(), query.entity(i).terms,
                                           params.text, params.first_pass_k));
  }
  for (std::size_t r = 0; r < query.relationship_count(); ++r) {
    lists.relationships.push_back(RankDocuments(index.relationships(),
                                                query.relationship(r).terms, params.text,
                                                params.first_pass_k));
  }
  return lists;
}

std::string CandidateTuple::key() const { return JoinTupleKey(entities); }

std::string CandidateTuple::canonical_key() const { return CanonicalTupleKey(entities); }

std::vector<CandidateTuple> JoinCandidates(const ERQuery &query, const ERIndex &index,
                                           const CandidateLists &lists,
                                           const RetrievalParams &params,
                                           bool with_features) {
  const std::size_t arity = query.arity();
  std::vector<CandidateTuple> out;

  std::vector<std::unordered_map<std::string_view, std::size_t>> entity_pos(arity);
  for (std::size_t i = 0; i < arity; ++i) {
    const auto &list = lists.entities[i];
    for (std::size_t p = 0; p < list.docs.size(); ++p) entity_pos[i].emplace(list.key(p), p);
  }

  std::vector<ListFeatures> entity_features, relationship_features;
  if (with_features) {
    for (std::size_t i = 0; i < arity; ++i) {
      entity_features.emplace_back(lists.entities[i], query.entity(i).terms, params.text);
    }
    for (std::size_t r = 0; r + 1 < arity; ++r) {
      relationship_features.emplace_back(lists.relationships[r],
                                         query.relationship(r).terms, params.text);
    }
  }

  // Oriented edges per relationship sub-query: entity i -> entity i + 1.
  struct Edge {
    std::size_t to_pos;  // position in entity list r + 1
    std::size_t pair_pos;
  };
  std::vector<std::unordered_map<std::size_t, std::vector<Edge>>> edges(arity - 1);
  for (std::size_t r = 0; r + 1 < arity; ++r) {
    const auto &list = lists.relationships[r];
    for (std::size_t p = 0; p < list.docs.size(); ++p) {
      const EntityPair &pair = index.pair(list.docs[p].doc);
      for (const auto &[a, b] : {std::pair{&pair.first(), &pair.second()},
                                 std::pair{&pair.second(), &pair.first()}}) {
        auto ia = entity_pos[r].find(*a);
        auto ib = entity_pos[r + 1].find(*b);
        if (ia != entity_pos[r].end() && ib != entity_pos[r + 1].end()) {
          edges[r][ia->second].push_back({ib->second, p});
        }
      }
    }
  }

  std::vector<std::size_t> ent(arity), rel(arity ? arity - 1 : 0);

  auto emit = [&] {
    CandidateTuple t;
    for (std::size_t i = 0; i < arity; ++i) {
      t.entities.push_back(lists.entities[i].key(ent[i]));
      t.subquery_scores.push_back(lists.entities[i].docs[ent[i]].score);
      if (i + 1 < arity) {
        t.pairs.push_back(index.pair(lists.relationships[i].docs[rel[i]].doc));
        t.subquery_scores.push_back(lists.relationships[i].docs[rel[i]].score);
      }
    }
    if (with_features) {
      for (std::size_t i = 0; i < arity; ++i) {
        Accumulate(t.features, entity_features[i].at(ent[i]), kEntityUnigram);
      }
      for (std::size_t r = 0; r + 1 < arity; ++r) {
        Accumulate(t.features, relationship_features[r].at(rel[r]), kRelationshipUnigram);
        t.features[kEntityRelationship] +=
            CompatER(t.entities[r], t.pairs[r], index, params.alpha) +
            CompatER(t.entities[r + 1], t.pairs[r], index, params.alpha);
      }
      for (std::size_t r = 1; r + 1 < arity; ++r) {
        t.features[kRelationshipChain] += CompatRER(t.entities[r], t.pairs[r - 1], t.pairs[r]);
      }
    }
    out.push_back(std::move(t));
  };

  if (arity == 1) {
    for (std::size_t p = 0; p < lists.entities[0].docs.size(); ++p) {
      ent[0] = p;
      emit();
    }
    return out;
  }

  std::function<void(std::size_t)> extend = [&](std::size_t r) {
    if (r + 1 == arity) {
      emit();
      return;
    }
    auto it = edges[r].find(ent[r]);
    if (it == edges[r].end()) return;
    for (const Edge &e : it->second) {
      // Consecutive pairs must share exactly the bridge entity.
      if (r > 0 && e.to_pos < lists.entities[r + 1].docs.size() &&
          lists.entities[r + 1].key(e.to_pos) == lists.entities[r - 1].key(ent[r - 1])) {
        continue;
      }
      ent[r + 1] = e.to_pos;
      rel[r] = e.pair_pos;
      extend(r + 1);
    }
  };
  for (std::size_t p = 0; p < lists.entities[0].docs.size(); ++p) {
    ent[0] = p;
    extend(0);
  }
  return out;
}

std::vector<CandidateTuple> RankTuples(std::vector<CandidateTuple> tuples,
                                       std::size_t max_results) {
  std::vector<std::pair<std::string, std::size_t>> keyed;
  keyed.reserve(tuples.size());
  for (std::size_t i = 0; i < tuples.size(); ++i) keyed.emplace_back(tuples[i].key(), i);
  std::sort(keyed.begin(), keyed.end(), [&](const auto &a, const auto &b) {
    const double sa = tuples[a.second].score, sb = tuples[b.second].score;
    if (sa != sb) return sa > sb;
    return a.first < b.first;
  });
  std::vector<CandidateTuple> out;
  std::unordered_set<std::string> seen;
  for (const auto &[key, i] : keyed) {
    if (out.size() == max_results) break;
    if (!seen.insert(tuples[i].canonical_key()).second) continue;
    out.push_back(std::move(tuples[i]));
  }
  return out;
}

std::vector<CandidateTuple> JoinAndScore(const ERQuery &query, const ERIndex &index,
                                         const CandidateLists &lists, RankingModel model,
                                         const FeatureWeights &weights,
                                         const RetrievalParams &params) {
  if (model != RankingModel::kEarlyFusion && model != RankingModel::kERDM) {
    throw ValidationError("JoinAndScore supports ef and erdm only");
  }
  const bool erdm = model == RankingModel::kERDM;
  auto tuples = JoinCandidates(query, index, lists, params, erdm);
  for (auto &t : tuples) {
    if (erdm) {
      t.score = weights.Score(t.features);
      continue;
    }
    // Entity scores first, then relationship scores: the grouping of the
    // unigram feature sums, so EF and unigram-only ERDM round alike.
    double e = 0.0, r = 0.0;
    for (std::size_t i = 0; i < t.subquery_scores.size(); ++i) {
      (i % 2 == 0 ? e : r) += t.subquery_scores[i];
    }
    t.score = e + r;
  }
  return RankTuples(std::move(tuples), params.max_results);
}

std::vector<CandidateTuple> Search(const ERQuery &query, const ERIndex &index,
                                   RankingModel model, const RetrievalParams &params,
                                   const FeatureWeights &weights) {
  params.Validate();
  switch (model) {
    case RankingModel::kEarlyFusion:
    case RankingModel::kERDM:
      return JoinAndScore(query, index, GenerateCandidates(query, index, params), model,
                          weights, params);
    case RankingModel::kLateFusion: return LateFusion(query, index, params);
    case RankingModel::kBaseEE: return BaseEE(query, index, params);
    case RankingModel::kBaseE: return BaseE(query, index, params);
    case RankingModel::kBaseR: return BaseR(query, index, params);
  }
  return {};
}

}  // namespace ersearch
