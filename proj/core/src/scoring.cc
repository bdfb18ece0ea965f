#include "ersearch/scoring.h"

#include <algorithm>
#include <cmath>

#include "ersearch/er_index.h"
#include "ersearch/error.h"

namespace ersearch {

std::string_view ScorerFamilyName(ScorerFamily family) {
  return family == ScorerFamily::kLM ? "lm" : "bm25";
}

ScorerFamily ParseScorerFamily(std::string_view name) {
  if (name == "lm") return ScorerFamily::kLM;
  if (name == "bm25") return ScorerFamily::kBM25;
  throw ValidationError("unknown scorer '" + std::string(name) + "' (expected lm or bm25)");
}

double DirichletLogProb(double tf, double cf, double doc_length, double total_terms,
                        double mu) {
  if (tf == 0 && cf == 0) return kUnseenTermScore;
  const double background = total_terms > 0 ? cf / total_terms : 0.0;
  return std::log10((tf + mu * background) / (doc_length + mu));
}

double Bm25Weight(double tf, double df, double doc_count, double doc_length,
                  double avg_doc_length, const Bm25Params &params) {
  if (tf == 0) return 0.0;
  const double idf = std::log10((doc_count - df + 0.5) / (df + 0.5));
  const double norm = avg_doc_length > 0 ? doc_length / avg_doc_length : 1.0;
  return idf * tf * (params.k1 + 1) /
         (tf + params.k1 * (1 - params.b + params.b * norm));
}

double CompatER(bool member, std::size_t entity_pair_count, std::size_t pair_total,
                double alpha) {
  const double prior =
      pair_total ? static_cast<double>(entity_pair_count) / pair_total : 0.0;
  return (1 - alpha) * (member ? 1.0 : 0.0) + alpha * prior;
}

double CompatER(std::string_view entity, const EntityPair &pair, const ERIndex &index,
                double alpha) {
  return CompatER(pair.Contains(entity), index.membership_count(entity),
                  index.relationships().size(), alpha);
}

int CompatRER(std::string_view entity, const EntityPair &left, const EntityPair &right) {
  return left.Contains(entity) && right.Contains(entity) ? 1 : 0;
}

}  // namespace ersearch
