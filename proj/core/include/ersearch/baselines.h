#ifndef ERSEARCH_BASELINES_H_
#define ERSEARCH_BASELINES_H_

#include <span>
#include <string>
#include <vector>

#include "ersearch/retrieval.h"

namespace ersearch {

// Sequential dependence scoring: the weighted sum of the unigram, ordered
// and unordered-window feature sums under params.sdm_weights. Returns every
// matching document, best first.
RankedList RankDocumentsSdm(const MetaIndex &part, std::span<const std::string> terms,
                            const RetrievalParams &params);

// The three pair baselines accept |Q| = 3 only and throw ValidationError
// otherwise. subquery_scores holds the component scores that were summed.

// Cross product of two entity runs: E1 + R terms and R + E2 terms.
std::vector<CandidateTuple> BaseEE(const ERQuery &query, const ERIndex &index,
                                   const RetrievalParams &params);
// Cross product of one entity run over all query terms with itself.
std::vector<CandidateTuple> BaseE(const ERQuery &query, const ERIndex &index,
                                  const RetrievalParams &params);
// All query terms against the full-sentence pair index.
std::vector<CandidateTuple> BaseR(const ERQuery &query, const ERIndex &index,
                                  const RetrievalParams &params);

}  // namespace ersearch

#endif  // ERSEARCH_BASELINES_H_
