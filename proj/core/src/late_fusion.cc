#include "ersearch/late_fusion.h"

#include <functional>
#include <numeric>

namespace ersearch {

LateFusionScores AggregateLateFusion(const ERQuery &query, const ERIndex &index,
                                     const RetrievalParams &params) {
  LateFusionScores out;
  const MetaIndex &docs = index.documents();
  for (std::size_t i = 0; i < query.arity(); ++i) {
    auto list = RankDocuments(docs, query.entity(i).terms, params.text, params.first_pass_k);
    auto &scores = out.entities.emplace_back();
    for (const auto &d : list.docs) {
      for (const EntityId &e : index.document_entities(d.doc)) scores[e] += d.score;
    }
    out.entity_documents.push_back(std::move(list));
  }
  for (std::size_t r = 0; r < query.relationship_count(); ++r) {
    auto list = RankDocuments(docs, query.relationship(r).terms, params.text,
                              params.first_pass_k);
    auto &scores = out.pairs.emplace_back();
    for (const auto &d : list.docs) {
      const auto entities = index.document_entities(d.doc);
      for (std::size_t a = 0; a < entities.size(); ++a) {
        for (std::size_t b = a + 1; b < entities.size(); ++b) {
          scores[EntityPair(entities[a], entities[b])] += d.score;
        }
      }
    }
    out.relationship_documents.push_back(std::move(list));
  }
  return out;
}

std::vector<CandidateTuple> LateFusion(const ERQuery &query, const ERIndex &index,
                                       const RetrievalParams &params) {
  const LateFusionScores agg = AggregateLateFusion(query, index, params);
  const std::size_t arity = query.arity();

  auto entity_score = [&](std::size_t i, const EntityId &e) {
    auto it = agg.entities[i].find(e);
    return it == agg.entities[i].end() ? 0.0 : it->second;
  };

  std::vector<CandidateTuple> tuples;
  if (arity == 1) {
    for (const auto &[e, s] : agg.entities[0]) {
      CandidateTuple t;
      t.entities = {e};
      t.subquery_scores = {s};
      t.score = s;
      tuples.push_back(std::move(t));
    }
    return RankTuples(std::move(tuples), params.max_results);
  }

  struct Edge {
    const EntityId *to;
    const EntityPair *pair;
    double score;
  };
  // Adjacency by source entity, one map per relationship sub-query.
  std::vector<std::map<EntityId, std::vector<Edge>>> edges(arity - 1);
  for (std::size_t r = 0; r + 1 < arity; ++r) {
    for (const auto &[pair, s] : agg.pairs[r]) {
      edges[r][pair.first()].push_back({&pair.second(), &pair, s});
      edges[r][pair.second()].push_back({&pair.first(), &pair, s});
    }
  }

  std::vector<const EntityId *> ent(arity);
  std::vector<const Edge *> rel(arity - 1);
  std::function<void(std::size_t)> extend = [&](std::size_t r) {
    if (r + 1 == arity) {
      CandidateTuple t;
      for (std::size_t i = 0; i < arity; ++i) {
        t.entities.push_back(*ent[i]);
        t.subquery_scores.push_back(entity_score(i, *ent[i]));
        if (i + 1 < arity) {
          t.pairs.push_back(*rel[i]->pair);
          t.subquery_scores.push_back(rel[i]->score);
        }
      }
      t.score = std::accumulate(t.subquery_scores.begin(), t.subquery_scores.end(), 0.0);
      tuples.push_back(std::move(t));
      return;
    }
    auto it = edges[r].find(*ent[r]);
    if (it == edges[r].end()) return;
    for (const Edge &e : it->second) {
      if (r > 0 && *e.to == *ent[r - 1]) continue;
      ent[r + 1] = e.to;
      rel[r] = &e;
      extend(r + 1);
    }
  };
  for (const auto &[source, _] : edges[0]) {
    ent[0] = &source;
    extend(0);
  }
  return RankTuples(std::move(tuples), params.max_results);
}

}  // namespace ersearch
