#include "ersearch/text_features.h"

#include <algorithm>

namespace ersearch {

double GramFeature(ScorerFamily family, const GramStats &gram, std::uint64_t doc_length,
                   const CollectionStats &stats, const Bm25Params &bm25) {
  if (family == ScorerFamily::kLM) {
    return DirichletLogProb(static_cast<double>(gram.tf), static_cast<double>(gram.cf),
                            static_cast<double>(doc_length),
                            static_cast<double>(stats.total_terms), stats.mu);
  }
  return Bm25Weight(static_cast<double>(gram.tf), static_cast<double>(gram.df),
                    static_cast<double>(stats.doc_count), static_cast<double>(doc_length),
                    stats.avg_doc_length, bm25);
}

double LmUnigram(const MetaIndex &part, std::string_view key, std::string_view term) {
  const auto s = part.unigram_stats(key, term);
  return GramFeature(ScorerFamily::kLM, {s.tf, s.cf, s.df}, s.doc_length, part.stats());
}

double Bm25Unigram(const MetaIndex &part, std::string_view key, std::string_view term,
                   const Bm25Params &params) {
  const auto s = part.unigram_stats(key, term);
  return GramFeature(ScorerFamily::kBM25, {s.tf, s.cf, s.df}, s.doc_length, part.stats(),
                     params);
}

namespace {

GramStats BigramStats(const MetaIndex &part, std::string_view key, std::string_view t1,
                      std::string_view t2, GramMode mode, std::uint32_t window) {
  return mode == GramMode::kOrdered ? part.ordered_bigram_stats(key, t1, t2)
                                    : part.unordered_window_stats(key, t1, t2, window);
}

}  // namespace

double LmBigram(const MetaIndex &part, std::string_view key, std::string_view t1,
                std::string_view t2, GramMode mode, std::uint32_t window) {
  const auto g = BigramStats(part, key, t1, t2, mode, window);
  return GramFeature(ScorerFamily::kLM, g, part.doc_length(part.Require(key)), part.stats());
}

double Bm25Bigram(const MetaIndex &part, std::string_view key, std::string_view t1,
                  std::string_view t2, GramMode mode, std::uint32_t window,
                  const Bm25Params &params) {
  const auto g = BigramStats(part, key, t1, t2, mode, window);
  return GramFeature(ScorerFamily::kBM25, g, part.doc_length(part.Require(key)),
                     part.stats(), params);
}

SubQueryScorer::SubQueryScorer(const MetaIndex &part, std::span<const std::string> terms,
                               const TextScoringParams &params)
    : part_(&part), params_(params) {
  for (const auto &t : terms) unigrams_.push_back(part.Unigram(t));
  for (std::size_t i = 0; i + 1 < terms.size(); ++i) {
    ordered_.push_back(part.OrderedBigram(terms[i], terms[i + 1]));
    unordered_.push_back(part.UnorderedWindow(terms[i], terms[i + 1], params.window));
  }
}

std::vector<DocId> SubQueryScorer::MatchingDocuments() const {
  std::vector<DocId> docs;
  for (const auto &g : unigrams_) {
    for (const auto &e : g.entries()) docs.push_back(e.doc);
  }
  std::sort(docs.begin(), docs.end());
  docs.erase(std::unique(docs.begin(), docs.end()), docs.end());
  return docs;
}

double SubQueryScorer::Score(const GramPostings &gram, DocId doc) const {
  return GramFeature(params_.family, {gram.tf(doc), gram.cf(), gram.df()},
                     part_->doc_length(doc), part_->stats(), params_.bm25);
}

double SubQueryScorer::Sum(const std::vector<GramPostings> &grams, DocId doc,
                           bool unseen_penalty) const {
  double total = 0.0;
  for (const auto &g : grams) {
    if (g.cf() == 0) {
      if (unseen_penalty && params_.family == ScorerFamily::kLM) total += kUnseenTermScore;
      continue;
    }
    total += Score(g, doc);
  }
  return total;
}

double SubQueryScorer::Unigram(DocId doc) const { return Sum(unigrams_, doc, true); }

TextFeatures SubQueryScorer::Features(DocId doc) const {
  return {Sum(unigrams_, doc, true), Sum(ordered_, doc, false), Sum(unordered_, doc, false)};
}

}  // namespace ersearch
