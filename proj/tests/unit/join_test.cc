#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "builders.h"
#include "ersearch/er_index.h"
#include "ersearch/error.h"
#include "ersearch/retrieval.h"
#include "ersearch/tuple_key.h"
#include "oracles.h"

namespace ersearch {
namespace {

using testing::DocBuilder;
namespace toy = testing::toy;

ERQuery Q(std::initializer_list<std::string> parts) {
  std::vector<SubQuery> sq;
  bool e = true;
  for (const auto &p : parts) {
    sq.push_back(e ? SubQuery::Entity(p) : SubQuery::Relationship(p));
    e = !e;
  }
  return ERQuery("q", std::move(sq));
}

std::vector<std::string> Keys(const std::vector<CandidateTuple> &ts) {
  std::vector<std::string> out;
  for (const auto &t : ts) out.push_back(t.key());
  return out;
}

void ExpectMatchesOracle(const std::vector<CandidateTuple> &got,
                         const std::vector<testing::OracleTuple> &want) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    ASSERT_EQ(got[i].key(), testing::OracleKey(want[i].entities)) << "rank " << i;
    ASSERT_NEAR(got[i].score, want[i].score, 1e-9) << "rank " << i;
  }
}

TEST(FirstPass, ToyEntityRanking) {
  const ERIndex index = ERIndex::Build(testing::ToyCorpus(), testing::ToyConfig());
  const std::vector<std::string> terms = {"soccer", "player"};
  const auto list = RankDocuments(index.entities(), terms, {}, 10);
  ASSERT_GE(list.docs.size(), 4u);
  EXPECT_EQ(list.key(0), toy::kMessi);
  EXPECT_EQ(list.key(1), toy::kRonaldo);
  EXPECT_EQ(list.key(2), toy::kFigo);
  EXPECT_EQ(list.key(3), toy::kBrady);
  EXPECT_NEAR(list.docs[0].score, -1.6947, 1.5e-3);
  EXPECT_NEAR(list.docs[3].score, -2.7958, 1.5e-3);
  EXPECT_GT(list.docs[0].score, list.docs[1].score);

  const auto one = RankDocuments(index.entities(), terms, {}, 1);
  ASSERT_EQ(one.docs.size(), 1u);
  EXPECT_EQ(one.key(0), toy::kMessi);
}

TEST(FirstPass, FullDepthEqualsExhaustiveScoring) {
  const Corpus c = testing::RandomCorpus(44);
  const ERIndex index = ERIndex::Build(c);
  const testing::OracleIndex oracle(c, testing::OraclePart::kEntity);
  for (ScorerFamily f : {ScorerFamily::kLM, ScorerFamily::kBM25}) {
    TextScoringParams p;
    p.family = f;
    const std::vector<std::string> terms = {"w1", "w3"};
    const auto got = RankDocuments(index.entities(), terms, p, 100000);
    const auto want = oracle.Rank(terms, p, 100000);
    ASSERT_EQ(got.docs.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
      ASSERT_EQ(got.key(i), want[i].first);
      ASSERT_NEAR(got.docs[i].score, want[i].second, 1e-9);
    }
  }
}

TEST(EarlyFusion, ToyRanking) {
  const ERIndex index = ERIndex::Build(testing::ToyCorpus(), testing::ToyConfig());
  const auto tuples = Search(Q({"soccer player", "dated", "top model"}), index,
                             RankingModel::kEarlyFusion, {});
  ASSERT_GE(tuples.size(), 3u);
  EXPECT_EQ(tuples[0].entities[0], toy::kRonaldo);
  EXPECT_EQ(tuples[0].entities[1], toy::kIrina);
  EXPECT_EQ(tuples[1].entities[0], toy::kFigo);
  EXPECT_EQ(tuples[2].entities[0], toy::kBrady);
  // Sub-scores in E1, R, E2 order; the score is their sum.
  ASSERT_EQ(tuples[0].subquery_scores.size(), 3u);
  EXPECT_NEAR(tuples[0].subquery_scores[0], -1.7351, 1.5e-3);
  EXPECT_NEAR(tuples[0].subquery_scores[1], -0.4130, 1.5e-3);
  EXPECT_NEAR(tuples[0].score,
              tuples[0].subquery_scores[0] + tuples[0].subquery_scores[1] +
                  tuples[0].subquery_scores[2],
              1e-12);
  for (const auto &t : tuples) EXPECT_NE(t.entities[0], toy::kMessi);
}

Corpus ChainCorpus() {
  Corpus c;
  c.Add(DocBuilder("d1").Entity("A", "Ann").Word("rel").Entity("B", "Bob").End()
            .Entity("B", "Bob").Word("rel").Entity("C", "Cy").End()
            .Entity("C", "Cy").Word("other").Entity("D", "Di").End().Build());
  c.Add(DocBuilder("d2").Entity("A", "Ann").Word("kind").End().Entity("B", "Bob").Word("kind").End()
            .Entity("C", "Cy").Word("kind").End().Entity("D", "Di").Word("kind").End().Build());
  return c;
}

TEST(Join, ChainsShareTheBridge) {
  const ERIndex index = ERIndex::Build(ChainCorpus());
  const auto tuples =
      Search(Q({"kind", "rel", "kind", "rel", "kind"}), index, RankingModel::kEarlyFusion, {});
  // (A,B),(B,C) share B; the reversal (C,B,A) is the same canonical tuple.
  ASSERT_EQ(tuples.size(), 1u);
  EXPECT_EQ(tuples[0].canonical_key(), "A|B|C");
  ASSERT_EQ(tuples[0].pairs.size(), 2u);

  // (A,B) and (C,D) never chain.
  const auto none =
      Search(Q({"kind", "rel", "kind", "other", "kind", "rel", "kind"}), index,
             RankingModel::kEarlyFusion, {});
  for (const auto &t : none) {
    EXPECT_NE(t.canonical_key(), "A|B|C|D");
  }
  Corpus split;
  split.Add(DocBuilder("d1").Entity("A", "Ann").Word("rel").Entity("B", "Bob").End()
                .Entity("C", "Cy").Word("other").Entity("D", "Di").End().Build());
  const auto disjoint = Search(Q({"rel", "rel", "rel", "other", "other"}), ERIndex::Build(split),
                               RankingModel::kEarlyFusion, {});
  EXPECT_TRUE(disjoint.empty());
}

TEST(Join, NoBacktrackOverSamePair) {
  const ERIndex index = ERIndex::Build(ChainCorpus());
  const auto tuples =
      Search(Q({"kind", "rel", "kind", "rel", "kind"}), index, RankingModel::kERDM, {});
  for (const auto &t : tuples) {
    EXPECT_NE(t.entities[0], t.entities[2]);
    EXPECT_EQ(t.features[kRelationshipChain], 1.0);
  }
}

TEST(Join, MatchesBruteForceOn20Entities) {
  testing::RandomCorpusOptions opts;
  opts.docs = 30;
  opts.entities = 20;
  opts.vocabulary = 10;
  std::mt19937_64 rng(20);
  for (int round = 0; round < 12; ++round) {
    const Corpus c = testing::RandomCorpus(2000 + round, opts);
    const ERIndex index = ERIndex::Build(c);
    const std::size_t arity = 2 + round % 2;
    std::vector<SubQuery> sq;
    for (std::size_t i = 0; i < arity; ++i) {
      if (i) sq.push_back(SubQuery::Relationship("w" + std::to_string(rng() % 10)));
      sq.push_back(SubQuery::Entity("w" + std::to_string(rng() % 10) + " w" +
                                    std::to_string(rng() % 10)));
    }
    const ERQuery q("q", sq);
    RetrievalParams params;
    params.max_results = 50;
    params.text.family = round % 3 ? ScorerFamily::kLM : ScorerFamily::kBM25;
    FeatureVector w{};
    for (auto &x : w) x = 1.0 + double(rng() % 9);
    const FeatureWeights weights(w);
    for (RankingModel m : {RankingModel::kEarlyFusion, RankingModel::kERDM}) {
      SCOPED_TRACE("round " + std::to_string(round) + " " + std::string(ModelName(m)));
      ExpectMatchesOracle(Search(q, index, m, params, weights),
                          testing::BruteForceJoin(c, q, m, weights, params));
    }
  }
}

TEST(Join, FirstPassCutRestrictsCandidates) {
  testing::RandomCorpusOptions opts;
  opts.entities = 15;
  const Corpus c = testing::RandomCorpus(61, opts);
  const ERIndex index = ERIndex::Build(c);
  const ERQuery q = Q({"w0 w1", "w2", "w1"});
  RetrievalParams params;
  params.first_pass_k = 3;
  const auto lists = GenerateCandidates(q, index, params);
  for (const auto &l : lists.entities) EXPECT_LE(l.docs.size(), 3u);
  const auto tuples = JoinAndScore(q, index, lists, RankingModel::kEarlyFusion, {}, params);
  ExpectMatchesOracle(tuples, testing::BruteForceJoin(c, q, RankingModel::kEarlyFusion, {}, params));
}

TEST(Join, EveryTupleSatisfiesTheConstraints) {
  const Corpus c = testing::RandomCorpus(71);
  const ERIndex index = ERIndex::Build(c);
  const ERQuery q = Q({"w0", "w1", "w2", "w3", "w4"});
  RetrievalParams params;
  const auto lists = GenerateCandidates(q, index, params);
  const auto tuples = JoinCandidates(q, index, lists, params, true);
  ASSERT_FALSE(tuples.empty());
  auto in = [](const RankedList &l, const std::string &key) {
    for (std::size_t i = 0; i < l.docs.size(); ++i) {
      if (l.key(i) == key) return true;
    }
    return false;
  };
  for (const auto &t : tuples) {
    for (std::size_t i = 0; i < 3; ++i) ASSERT_TRUE(in(lists.entities[i], t.entities[i]));
    for (std::size_t r = 0; r < 2; ++r) {
      ASSERT_TRUE(in(lists.relationships[r], t.pairs[r].Key()));
      ASSERT_TRUE(t.pairs[r].Contains(t.entities[r]));
      ASSERT_TRUE(t.pairs[r].Contains(t.entities[r + 1]));
    }
    ASSERT_NE(t.pairs[0], t.pairs[1]);
    ASSERT_EQ(t.subquery_scores.size(), 5u);
  }
}

TEST(Erdm, ScalingWeightsKeepsOrder) {
  const Corpus c = testing::RandomCorpus(81);
  const ERIndex index = ERIndex::Build(c);
  const ERQuery q = Q({"w0 w2", "w1 w3", "w2"});
  FeatureVector w = {3, 1, 1, 2, 1, 1, 4, 0};
  FeatureVector scaled;
  for (std::size_t i = 0; i < kFeatureCount; ++i) scaled[i] = 7.5 * w[i];
  const auto a = Search(q, index, RankingModel::kERDM, {}, FeatureWeights(w));
  const auto b = Search(q, index, RankingModel::kERDM, {}, FeatureWeights(scaled));
  ASSERT_FALSE(a.empty());
  EXPECT_EQ(Keys(a), Keys(b));
}

TEST(Erdm, UnigramOnlyMatchesEarlyFusion) {
  for (int seed = 0; seed < 20; ++seed) {
    const Corpus c = testing::RandomCorpus(300 + seed);
    const ERIndex index = ERIndex::Build(c);
    const ERQuery q = Q({"w0 w1", "w2", "w3", "w4", "w1"});
    EXPECT_EQ(Keys(Search(q, index, RankingModel::kEarlyFusion, {})),
              Keys(Search(q, index, RankingModel::kERDM, {}, FeatureWeights::UnigramOnly())));
  }
}

TEST(Erdm, SingleEntityIsEntityRanking) {
  const Corpus c = testing::RandomCorpus(91);
  const ERIndex index = ERIndex::Build(c);
  const ERQuery q = Q({"w1 w2"});
  const auto tuples = Search(q, index, RankingModel::kEarlyFusion, {});
  const auto list = RankDocuments(index.entities(), q.entity(0).terms, {}, 100);
  ASSERT_EQ(tuples.size(), list.docs.size());
  for (std::size_t i = 0; i < tuples.size(); ++i) EXPECT_EQ(tuples[i].key(), list.key(i));
}

TEST(RankTuples, DedupesCanonicalAndBreaksTiesByKey) {
  auto make = [](std::vector<EntityId> e, double s) {
    CandidateTuple t;
    t.entities = std::move(e);
    t.score = s;
    return t;
  };
  const auto out = RankTuples({make({"b", "a"}, 1.0), make({"a", "b"}, 1.0), make({"c", "d"}, 2.0),
                               make({"a", "c"}, 1.0), make({"x", "y"}, 0.5)},
                              3);
  EXPECT_EQ(Keys(out), (std::vector<std::string>{"c|d", "a|b", "a|c"}));
}

TEST(FeatureWeights, Validation) {
  FeatureVector v{};
  EXPECT_THROW(FeatureWeights{v}, ValidationError);
  v[0] = -1;
  v[1] = 2;
  EXPECT_THROW(FeatureWeights{v}, ValidationError);
  v[0] = NAN;
  EXPECT_THROW(FeatureWeights{v}, ValidationError);
  v = {2, 2, 0, 0, 0, 0, 0, 4};
  const FeatureWeights w(v);
  EXPECT_DOUBLE_EQ(w[0], 0.25);
  EXPECT_DOUBLE_EQ(w[kRelationshipChain], 0.5);
  double sum = 0;
  for (double x : FeatureWeights().values()) sum += x;
  EXPECT_DOUBLE_EQ(sum, 1.0);
  for (std::size_t i = 0; i < kFeatureCount; ++i) EXPECT_EQ(ParseFeatureName(FeatureName(i)), i);
  EXPECT_THROW(ParseFeatureName("E_X"), ValidationError);
}

TEST(Models, NamesAndParamValidation) {
  for (auto m : {RankingModel::kEarlyFusion, RankingModel::kLateFusion, RankingModel::kERDM,
                 RankingModel::kBaseEE, RankingModel::kBaseE, RankingModel::kBaseR}) {
    EXPECT_EQ(ParseModel(ModelName(m)), m);
  }
  EXPECT_THROW(ParseModel("bm42"), ValidationError);
  RetrievalParams p;
  p.alpha = 1.5;
  EXPECT_THROW(p.Validate(), ValidationError);
  p = {};
  p.text.window = 1;
  EXPECT_THROW(p.Validate(), ValidationError);
  p = {};
  p.first_pass_k = 0;
  EXPECT_THROW(p.Validate(), ValidationError);
  const ERIndex index = ERIndex::Build(ChainCorpus());
  EXPECT_THROW(JoinAndScore(Q({"kind"}), index, {}, RankingModel::kBaseR, {}, {}), ValidationError);
}

TEST(TupleKey, Canonical) {
  EXPECT_EQ(CanonicalTupleKey("b|a"), "a|b");
  EXPECT_EQ(CanonicalTupleKey("c|b|a"), "a|b|c");
  EXPECT_EQ(CanonicalTupleKey("a|c|b"), "a|c|b");
  EXPECT_EQ(CanonicalTupleKey("b|c|a"), "a|c|b");
  EXPECT_EQ(SplitTupleKey("x|y|z").size(), 3u);
}

}  // namespace
}  // namespace ersearch
