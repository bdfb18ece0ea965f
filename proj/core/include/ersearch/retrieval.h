#ifndef ERSEARCH_RETRIEVAL_H_
#define ERSEARCH_RETRIEVAL_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ersearch/er_index.h"
#include "ersearch/query.h"
#include "ersearch/text_features.h"

namespace ersearch {

// ERDM feature classes, one weight each.
enum FeatureClass : std::size_t {
  kEntityUnigram,          // f^E_T
  kEntityOrdered,          // f^E_O
  kEntityUnordered,        // f^E_U
  kRelationshipUnigram,    // f^R_T
  kRelationshipOrdered,    // f^R_O
  kRelationshipUnordered,  // f^R_U
  kEntityRelationship,     // f^ER_S
  kRelationshipChain,      // f^RER_S
  kFeatureCount,
};

using FeatureVector = std::array<double, kFeatureCount>;

// Short names used in weight files: E_T E_O E_U R_T R_O R_U ER_S RER_S.
std::string_view FeatureName(std::size_t feature);
// Throws ValidationError.
std::size_t ParseFeatureName(std::string_view name);

// Feature weights on the probability simplex.
class FeatureWeights {
 public:
  FeatureWeights();  // uniform

  // Throws ValidationError if any weight is negative or not finite, or all
  // are zero. The stored weights are renormalized to sum to one.
  explicit FeatureWeights(const FeatureVector &lambda);

  // lambda^E_T = lambda^R_T = 1/2: ranks identically to Early Fusion.
  static FeatureWeights UnigramOnly();

  double operator[](std::size_t feature) const { return lambda_[feature]; }
  const FeatureVector &values() const { return lambda_; }
  double Score(const FeatureVector &features) const;

  bool operator==(const FeatureWeights &) const = default;

 private:
  FeatureVector lambda_;
};

enum class RankingModel { kEarlyFusion, kLateFusion, kERDM, kBaseEE, kBaseE, kBaseR };

std::string_view ModelName(RankingModel model);
// Accepts ef, lf, erdm, base-ee, base-e, base-r. Throws ValidationError.
RankingModel ParseModel(std::string_view name);

struct RetrievalParams {
  TextScoringParams text;
  // First-pass cut per sub-query, entity / pair grouped.
  std::size_t first_pass_k = 20000;
  std::size_t max_results = 100;
  double alpha = 0.1;  // f^ER_S smoothing
  // Unigram / ordered / unordered weights of the SDM scorer used by the
  // baselines.
  std::array<double, 3> sdm_weights = {0.8, 0.1, 0.1};

  // Throws ValidationError for out-of-range values.
  void Validate() const;
};

struct RankedDocument {
  DocId doc;
  double score;
};

// Top documents of one part: score descending, key ascending on ties.
struct RankedList {
  const MetaIndex *part = nullptr;
  std::vector<RankedDocument> docs;

  const std::string &key(std::size_t i) const { return part->key(docs[i].doc); }
};

// First-pass ranking of the documents that match at least one term.
RankedList RankDocuments(const MetaIndex &part, std::span<const std::string> terms,
                         const TextScoringParams &params, std::size_t k);

struct CandidateLists {
  std::vector<RankedList> entities;       // one per entity sub-query
  std::vector<RankedList> relationships;  // one per relationship sub-query
};

CandidateLists GenerateCandidates(const ERQuery &query, const ERIndex &index,
                                  const RetrievalParams &params);

struct CandidateTuple {
  std::vector<EntityId> entities;  // in entity sub-query order
  std::vector<EntityPair> pairs;   // in relationship sub-query order
  // Sub-query order: E1, R12, E2, R23, ...
  std::vector<double> subquery_scores;
  FeatureVector features{};
  double score = 0.0;

  std::string key() const;
  std::string canonical_key() const;
};

// Every tuple satisfying the association constraints: each pair was
// retrieved for its relationship sub-query, each entity was retrieved for
// its entity sub-query and belongs to its adjacent pairs, and consecutive
// pairs share exactly the bridge entity. Tuples carry sub-query scores and,
// when with_features is set, the ERDM feature vector. score is left 0.
std::vector<CandidateTuple> JoinCandidates(const ERQuery &query, const ERIndex &index,
                                           const CandidateLists &lists,
                                           const RetrievalParams &params,
                                           bool with_features);

// Sorts by score descending then key ascending, keeps the first tuple of
// each canonical key, truncates to max_results.
std::vector<CandidateTuple> RankTuples(std::vector<CandidateTuple> tuples,
                                       std::size_t max_results);

// Early Fusion (sum of sub-query scores) or ERDM (weighted feature sum).
// Throws ValidationError for any other model.
std::vector<CandidateTuple> JoinAndScore(const ERQuery &query, const ERIndex &index,
                                         const CandidateLists &lists, RankingModel model,
                                         const FeatureWeights &weights,
                                         const RetrievalParams &params);

// Runs any model end to end. weights is used by ERDM only.
std::vector<CandidateTuple> Search(const ERQuery &query, const ERIndex &index,
                                   RankingModel model, const RetrievalParams &params,
                                   const FeatureWeights &weights = FeatureWeights());

}  // namespace ersearch

#endif  // ERSEARCH_RETRIEVAL_H_
