#ifndef ERSEARCH_SCORING_H_
#define ERSEARCH_SCORING_H_

#include <cstddef>
#include <string_view>

#include "ersearch/extraction.h"

namespace ersearch {

class ERIndex;

// Contribution of a term that occurs nowhere in the collection. The
// smoothed probability is zero there, so a large negative constant stands
// in for log(0) and keeps scores totally ordered.
inline constexpr double kUnseenTermScore = -1e9;

enum class ScorerFamily { kLM, kBM25 };

std::string_view ScorerFamilyName(ScorerFamily family);
// Throws ValidationError.
ScorerFamily ParseScorerFamily(std::string_view name);

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

// Dirichlet-smoothed log10 probability:
//   log10((tf + mu * cf / |C|) / (|D| + mu)).
// Returns kUnseenTermScore when tf == 0 and cf == 0.
double DirichletLogProb(double tf, double cf, double doc_length, double total_terms,
                        double mu);

// log10((N - n + 0.5) / (n + 0.5)) * tf (k1 + 1) / (tf + k1 (1 - b + b |D| / avg)).
// The IDF factor is not clamped, so terms in most documents score negative.
double Bm25Weight(double tf, double df, double doc_count, double doc_length,
                  double avg_doc_length, const Bm25Params &params = {});

// Entity / relationship compatibility with Jelinek-Mercer smoothing:
//   (1 - alpha) * [entity in pair] + alpha * n(E) / N^R.
double CompatER(bool member, std::size_t entity_pair_count, std::size_t pair_total,
                double alpha);
double CompatER(std::string_view entity, const EntityPair &pair, const ERIndex &index,
                double alpha);

// 1 iff the entity belongs to both relationship documents.
int CompatRER(std::string_view entity, const EntityPair &left, const EntityPair &right);

}  // namespace ersearch

#endif  // ERSEARCH_SCORING_H_
