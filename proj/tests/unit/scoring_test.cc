#include <gtest/gtest.h>

#include <cmath>

#include "builders.h"
#include "ersearch/er_index.h"
#include "ersearch/error.h"
#include "ersearch/scoring.h"
#include "ersearch/text_features.h"
#include "oracles.h"

namespace ersearch {
namespace {

namespace toy = testing::toy;

const ERIndex &Toy() {
  static const ERIndex index = ERIndex::Build(testing::ToyCorpus(), testing::ToyConfig());
  return index;
}

TEST(Dirichlet, WorkedValues) {
  EXPECT_NEAR(DirichletLogProb(700, 3000, 4000, 100000, 1500), -0.8682, 5e-5);
  EXPECT_NEAR(DirichletLogProb(700, 8000, 4000, 100000, 1500), -0.8266, 1e-4);
  EXPECT_NEAR(DirichletLogProb(500, 5000, 800, 20000, 500), -0.3180, 1.5e-4);
  EXPECT_EQ(DirichletLogProb(0, 0, 10, 100, 5), kUnseenTermScore);
  // Smoothing-only value.
  EXPECT_DOUBLE_EQ(DirichletLogProb(0, 40, 10, 100, 5), std::log10((5 * 40.0 / 100) / 15));
}

TEST(Dirichlet, KeyedLookupsOnToy) {
  const double messi = LmUnigram(Toy().entities(), toy::kMessi, "soccer") +
                       LmUnigram(Toy().entities(), toy::kMessi, "player");
  EXPECT_NEAR(messi, -1.6947, 1.5e-3);
  const std::string pair = EntityPair(std::string(toy::kGisele), std::string(toy::kBrady)).Key();
  EXPECT_NEAR(LmUnigram(Toy().relationships(), pair, "dated"), -0.3180, 1.5e-3);
  EXPECT_EQ(LmUnigram(Toy().entities(), toy::kMessi, "zebra"), kUnseenTermScore);
  EXPECT_THROW(LmUnigram(Toy().entities(), "Nobody", "soccer"), NotFoundError);
}

TEST(Bm25, Formula) {
  EXPECT_EQ(Bm25Weight(0, 3, 10, 50, 40), 0.0);
  const double idf = std::log10((10 - 3 + 0.5) / (3 + 0.5));
  const double want = idf * 2 * 2.2 / (2 + 1.2 * (0.25 + 0.75 * 50.0 / 40));
  EXPECT_DOUBLE_EQ(Bm25Weight(2, 3, 10, 50, 40), want);
  // Term in every document: negative IDF, passed through.
  EXPECT_LT(Bm25Weight(3, 10, 10, 50, 40), 0.0);
  Bm25Params p{2.0, 0.0};
  EXPECT_DOUBLE_EQ(Bm25Weight(1, 1, 4, 9, 3, p),
                   std::log10(3.5 / 1.5) * 1 * 3.0 / (1 + 2.0));
}

TEST(Bm25, ToyHandRecomputation) {
  const MetaIndex &e = Toy().entities();
  const auto s = e.unigram_stats(toy::kRonaldo, "soccer");
  const double avg = 100000.0 / double(e.size());
  const double idf = std::log10((double(e.size()) - s.df + 0.5) / (s.df + 0.5));
  const double want = idf * 800 * 2.2 / (800 + 1.2 * (0.25 + 0.75 * 5000 / avg));
  EXPECT_NEAR(Bm25Unigram(e, toy::kRonaldo, "soccer"), want, 1e-12);
}

TEST(Bigrams, SingleTokenSubQueryHasNone) {
  const std::vector<std::string> one = {"soccer"};
  const SubQueryScorer scorer(Toy().entities(), one, {});
  const auto f = scorer.Features(Toy().entities().Require(toy::kRonaldo));
  EXPECT_EQ(f.ordered, 0.0);
  EXPECT_EQ(f.unordered, 0.0);
  EXPECT_NEAR(f.unigram, DirichletLogProb(800, 3000, 5000, 100000, 1500), 1e-12);
}

TEST(Bigrams, SmoothingOnlyWhenAbsentFromDocument) {
  MetaIndex::Builder b;
  b.Add("x", {"a", "b", "c"});
  b.Add("y", {"a", "c", "b"});
  const MetaIndex m = std::move(b).Build();
  const double mu = m.stats().mu;
  EXPECT_DOUBLE_EQ(LmBigram(m, "y", "a", "b", GramMode::kOrdered),
                   std::log10((mu * 1.0 / 6) / (3 + mu)));
  EXPECT_DOUBLE_EQ(LmBigram(m, "x", "a", "b", GramMode::kOrdered),
                   std::log10((1 + mu * 1.0 / 6) / (3 + mu)));
  EXPECT_DOUBLE_EQ(LmBigram(m, "y", "a", "b", GramMode::kUnordered, 8),
                   std::log10((1 + mu * 2.0 / 6) / (3 + mu)));
}

// Closed-form recomputation from oracle counts on a 50-context part.
TEST(SubQueryScorer, MatchesOracleOnRandomContexts) {
  testing::RandomCorpusOptions opts;
  opts.docs = 25;
  opts.min_sentences = 2;
  opts.max_sentences = 2;
  opts.vocabulary = 10;
  const Corpus c = testing::RandomCorpus(50, opts);
  const ERIndex index = ERIndex::Build(c);
  const testing::OracleIndex oracle(c, testing::OraclePart::kDocument);
  for (ScorerFamily family : {ScorerFamily::kLM, ScorerFamily::kBM25}) {
    TextScoringParams params;
    params.family = family;
    for (const std::vector<std::string> &terms :
         {std::vector<std::string>{"w0", "w1"}, {"w2", "w0", "w3"}, {"w1", "w1"}, {"w4", "zz"}}) {
      const SubQueryScorer scorer(index.documents(), terms, params);
      std::size_t matched = 0;
      for (DocId d : scorer.MatchingDocuments()) {
        const auto &key = index.documents().key(d);
        ASSERT_TRUE(oracle.Matches(key, terms));
        const auto f = scorer.Features(d);
        const auto want = oracle.Features(key, terms, params);
        ASSERT_NEAR(f.unigram, want.unigram, 1e-9) << key;
        ASSERT_NEAR(f.ordered, want.ordered, 1e-9) << key;
        ASSERT_NEAR(f.unordered, want.unordered, 1e-9) << key;
        ASSERT_EQ(scorer.Unigram(d), f.unigram);
        ++matched;
      }
      std::size_t want_matched = 0;
      for (const auto &[key, _] : oracle.docs()) want_matched += oracle.Matches(key, terms);
      EXPECT_EQ(matched, want_matched);
    }
  }
}

TEST(Compat, EntityRelationship) {
  EXPECT_DOUBLE_EQ(CompatER(true, 3, 10, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(CompatER(false, 5, 100, 1.0), 0.05);
  EXPECT_DOUBLE_EQ(CompatER(true, 5, 100, 0.1), 0.9 + 0.1 * 0.05);
  EXPECT_DOUBLE_EQ(CompatER(false, 0, 0, 0.5), 0.0);
}

TEST(Compat, MembershipRecount) {
  const Corpus c = testing::RandomCorpus(31);
  const ERIndex index = ERIndex::Build(c);
  const testing::OracleIndex pairs(c, testing::OraclePart::kRelationship);
  std::map<std::string, std::size_t> n;
  for (const auto &[key, _] : pairs.docs()) {
    const auto bar = key.find('|');
    ++n[key.substr(0, bar)];
    ++n[key.substr(bar + 1)];
  }
  const EntityPair some = index.pair(0);
  for (const auto &[e, count] : n) {
    ASSERT_EQ(index.membership_count(e), count) << e;
    EXPECT_DOUBLE_EQ(CompatER(e, some, index, 0.1),
                     0.9 * (some.Contains(e) ? 1 : 0) + 0.1 * double(count) / pairs.doc_count());
  }
}

TEST(Compat, Chain) {
  const EntityPair ab("A", "B"), bc("B", "C"), cd("C", "D");
  EXPECT_EQ(CompatRER("B", ab, bc), 1);
  EXPECT_EQ(CompatRER("A", ab, bc), 0);
  EXPECT_EQ(CompatRER("A", bc, cd), 0);
}

TEST(ScorerFamily, Names) {
  EXPECT_EQ(ParseScorerFamily(ScorerFamilyName(ScorerFamily::kLM)), ScorerFamily::kLM);
  EXPECT_EQ(ParseScorerFamily(ScorerFamilyName(ScorerFamily::kBM25)), ScorerFamily::kBM25);
  EXPECT_THROW(ParseScorerFamily("tfidf"), ValidationError);
}

}  // namespace
}  // namespace ersearch
