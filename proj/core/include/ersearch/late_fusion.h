#ifndef ERSEARCH_LATE_FUSION_H_
#define ERSEARCH_LATE_FUSION_H_

#include <map>
#include <unordered_map>
#include <vector>

#include "ersearch/retrieval.h"

namespace ersearch {

// Per sub-query aggregates over the top raw documents: an entity (pair)
// collects the scores of every top document that mentions it (both members).
struct LateFusionScores {
  std::vector<RankedList> entity_documents;        // per entity sub-query
  std::vector<RankedList> relationship_documents;  // per relationship sub-query
  std::vector<std::unordered_map<EntityId, double>> entities;
  std::vector<std::map<EntityPair, double>> pairs;
};

// Ranks raw documents per sub-query, keeps params.first_pass_k of them and
// aggregates entity and pair scores.
LateFusionScores AggregateLateFusion(const ERQuery &query, const ERIndex &index,
                                     const RetrievalParams &params);

// Tuples are chains over the aggregated pairs. The tuple score is the sum of
// its pair scores and of its entity scores, where an entity missing from an
// entity sub-query's documents scores 0. Each entity set keeps its best
// sub-query assignment.
std::vector<CandidateTuple> LateFusion(const ERQuery &query, const ERIndex &index,
                                       const RetrievalParams &params);

}  // namespace ersearch

#endif  // ERSEARCH_LATE_FUSION_H_
