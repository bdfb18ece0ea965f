#ifndef ERSEARCH_TEXT_FEATURES_H_
#define ERSEARCH_TEXT_FEATURES_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ersearch/meta_index.h"
#include "ersearch/scoring.h"

namespace ersearch {

struct TextScoringParams {
  ScorerFamily family = ScorerFamily::kLM;
  Bm25Params bm25;
  std::uint32_t window = 8;
};

// Sums over one sub-query of the unigram, ordered-bigram (#1) and
// unordered-window (#uwN) feature functions against one document.
struct TextFeatures {
  double unigram = 0.0;
  double ordered = 0.0;
  double unordered = 0.0;
};

enum class GramMode { kOrdered, kUnordered };

// Single feature-function evaluations on raw counts.
double GramFeature(ScorerFamily family, const GramStats &gram, std::uint64_t doc_length,
                   const CollectionStats &stats, const Bm25Params &bm25 = {});

// Keyed convenience wrappers over a part; throw NotFoundError for unknown keys.
double LmUnigram(const MetaIndex &part, std::string_view key, std::string_view term);
double LmBigram(const MetaIndex &part, std::string_view key, std::string_view t1,
                std::string_view t2, GramMode mode, std::uint32_t window = 8);
double Bm25Unigram(const MetaIndex &part, std::string_view key, std::string_view term,
                   const Bm25Params &params = {});
double Bm25Bigram(const MetaIndex &part, std::string_view key, std::string_view t1,
                  std::string_view t2, GramMode mode, std::uint32_t window = 8,
                  const Bm25Params &params = {});

// Scores documents of one index part against one sub-query. Gram postings
// for every query unigram and adjacent bigram are computed once up front.
//
// Under LM, a unigram that never occurs in the part contributes
// kUnseenTermScore. A bigram that never occurs contributes nothing: its
// value would be identical for every document of the part, so leaving it
// out cannot change any ranking.
class SubQueryScorer {
 public:
  SubQueryScorer(const MetaIndex &part, std::span<const std::string> terms,
                 const TextScoringParams &params);

  // Documents containing at least one query term, ascending.
  std::vector<DocId> MatchingDocuments() const;

  double Unigram(DocId doc) const;
  TextFeatures Features(DocId doc) const;

 private:
  double Score(const GramPostings &gram, DocId doc) const;
  double Sum(const std::vector<GramPostings> &grams, DocId doc, bool unseen_penalty) const;

  const MetaIndex *part_;
  TextScoringParams params_;
  std::vector<GramPostings> unigrams_;
  std::vector<GramPostings> ordered_;
  std::vector<GramPostings> unordered_;
};

}  // namespace ersearch

#endif  // ERSEARCH_TEXT_FEATURES_H_
