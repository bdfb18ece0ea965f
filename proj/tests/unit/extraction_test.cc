#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "builders.h"
#include "ersearch/er_index.h"
#include "ersearch/extraction.h"
#include "ersearch/retrieval.h"
#include "json.hpp"

namespace ersearch {
namespace {

using testing::DocBuilder;

std::vector<EntityExtraction> Entities(const AnnotatedDocument &d) {
  return ExtractEntityContexts(d, SegmentSentences(d));
}
std::vector<RelationshipExtraction> Pairs(const AnnotatedDocument &d,
                                          PairContext mode = PairContext::kSeparatingString) {
  return ExtractRelationshipContexts(d, SegmentSentences(d), mode);
}

TEST(EntityExtraction, FullSentenceContextPerEntity) {
  const auto d = DocBuilder("d").Entity("Irina_Shayik", "Irina Shayik").Word("dated")
                     .Entity("Cristiano_Ronaldo", "Cristiano Ronaldo").End().Build();
  const auto ex = Entities(d);
  ASSERT_EQ(ex.size(), 2u);
  const std::vector<std::string> ctx = {"irina", "shayik", "dated", "cristiano", "ronaldo"};
  for (const auto &e : ex) {
    EXPECT_EQ(e.context_terms, ctx);
    EXPECT_EQ(e.doc_id, "d");
    EXPECT_EQ(e.sentence_index, 0u);
  }
}

TEST(EntityExtraction, NoMentionsNoExtractions) {
  const auto d = DocBuilder("d").Word("nothing", 3).End().Build();
  EXPECT_TRUE(Entities(d).empty());
  EXPECT_TRUE(Pairs(d).empty());
}

TEST(EntityExtraction, RepeatedEntityOncePerSentence) {
  const auto d = DocBuilder("d").Entity("A", "Ann").Word("and").Entity("A", "Ann").End()
                     .Entity("A", "Ann").Word("again").End().Build();
  const auto ex = Entities(d);
  ASSERT_EQ(ex.size(), 2u);
  EXPECT_EQ(ex[0].sentence_index, 0u);
  EXPECT_EQ(ex[1].sentence_index, 1u);
  EXPECT_TRUE(Pairs(d).empty());
}

TEST(RelationshipExtraction, AllPairsOfThree) {
  const auto d = DocBuilder("d").Entity("A", "Ann").Word("x").Entity("B", "Bob").Word("y")
                     .Entity("C", "Cy").End().Build();
  const auto ex = Pairs(d);
  std::set<std::string> keys;
  for (const auto &e : ex) keys.insert(e.pair.Key());
  EXPECT_EQ(keys, (std::set<std::string>{"A|B", "A|C", "B|C"}));
  ASSERT_EQ(ex.size(), 3u);
  for (const auto &e : ex) {
    if (e.pair.Key() == "A|C") EXPECT_EQ(e.context_terms, (std::vector<std::string>{"x", "bob", "y"}));
  }
}

TEST(RelationshipExtraction, SeparatingString) {
  const auto d = DocBuilder("d").Word("so").Entity("X", "Xan").Word("dated").Entity("Y", "Yul")
                     .Word("later").End().Build();
  const auto ex = Pairs(d);
  ASSERT_EQ(ex.size(), 1u);
  EXPECT_EQ(ex[0].pair.Key(), "X|Y");
  EXPECT_EQ(ex[0].context_terms, (std::vector<std::string>{"dated"}));
  const auto full = Pairs(d, PairContext::kFullSentence);
  EXPECT_EQ(full[0].context_terms,
            (std::vector<std::string>{"so", "xan", "dated", "yul", "later"}));
}

TEST(RelationshipExtraction, SymmetricInMentionOrder) {
  const auto ab = DocBuilder("d").Entity("A", "Ann").Word("met").Entity("B", "Bob").End().Build();
  const auto ba = DocBuilder("d").Entity("B", "Bob").Word("met").Entity("A", "Ann").End().Build();
  const auto x = Pairs(ab), y = Pairs(ba);
  ASSERT_EQ(x.size(), 1u);
  ASSERT_EQ(y.size(), 1u);
  EXPECT_EQ(x[0].pair, y[0].pair);
  EXPECT_EQ(x[0].context_terms, y[0].context_terms);
  EXPECT_EQ(EntityPair("B", "A"), EntityPair("A", "B"));
  EXPECT_EQ(EntityPair::FromKey("B|A").Key(), "A|B");
}

TEST(RelationshipExtraction, FirstMentionsDelimit) {
  const auto d = DocBuilder("d").Entity("A", "Ann").Word("p").Entity("B", "Bob").Word("q")
                     .Entity("A", "Ann").Word("r").Entity("B", "Bob").End().Build();
  const auto ex = Pairs(d);
  ASSERT_EQ(ex.size(), 1u);
  EXPECT_EQ(ex[0].context_terms, (std::vector<std::string>{"p"}));
}

TEST(RelationshipExtraction, AdjacentMentionsKeepEmptyContext) {
  const auto d = DocBuilder("d").Entity("A", "Ann").Entity("B", "Bob").Word("z").End().Build();
  const auto ex = Pairs(d);
  ASSERT_EQ(ex.size(), 1u);
  EXPECT_TRUE(ex[0].context_terms.empty());

  // Downstream the empty pair document exists, has length 0 and takes the
  // smoothing-only score for a term seen elsewhere in the part.
  Corpus c;
  c.Add(d);
  c.Add(DocBuilder("e").Entity("C", "Cy").Word("z").Entity("D", "Di").End().Build());
  const ERIndex index = ERIndex::Build(c);
  const auto id = index.relationships().Find("A|B");
  ASSERT_TRUE(id);
  EXPECT_EQ(index.relationships().doc_length(*id), 0u);
  EXPECT_EQ(index.membership_count("A"), 1u);
  const std::vector<std::string> z = {"z"};
  const auto list = RankDocuments(index.relationships(), z, {}, 10);
  ASSERT_EQ(list.docs.size(), 1u);
  EXPECT_EQ(list.key(0), "C|D");
}

TEST(Extraction, CountsMatchNaiveDoubleLoop) {
  testing::RandomCorpusOptions opts;
  opts.docs = 50;
  opts.min_sentences = 2;
  opts.max_sentences = 2;
  opts.max_mentions = 5;
  opts.entities = 6;
  const Corpus c = testing::RandomCorpus(109, opts);
  std::size_t sentences = 0, ent = 0, rel = 0, want_ent = 0, want_rel = 0;
  for (const auto &doc : c) {
    const auto s = SegmentSentences(doc);
    sentences += s.size();
    ent += ExtractEntityContexts(doc, s).size();
    rel += ExtractRelationshipContexts(doc, s).size();
    for (const auto &sent : s) {
      std::vector<std::string> ids;
      for (auto m : sent.mention_refs) ids.push_back(doc.mentions[m].entity_id);
      std::set<std::string> distinct(ids.begin(), ids.end());
      want_ent += distinct.size();
      std::size_t pairs = 0;
      for (auto a = distinct.begin(); a != distinct.end(); ++a) {
        for (auto b = std::next(a); b != distinct.end(); ++b) ++pairs;
      }
      want_rel += pairs;
    }
  }
  EXPECT_EQ(sentences, 100u);
  EXPECT_EQ(ent, want_ent);
  EXPECT_EQ(rel, want_rel);
  EXPECT_GT(rel, 0u);
}

TEST(Extraction, DumpIsJsonLines) {
  const auto d = DocBuilder("d").Entity("A", "Ann").Word("met").Entity("B", "Bob").End().Build();
  std::ostringstream out;
  WriteExtractions(out, Entities(d), Pairs(d));
  std::istringstream in(out.str());
  std::map<std::string, int> types;
  for (std::string line; std::getline(in, line);) {
    const auto j = nlohmann::json::parse(line);
    ++types[j.at("type").get<std::string>()];
  }
  EXPECT_EQ(types["entity"], 2);
  EXPECT_EQ(types["relationship"], 1);
}

}  // namespace
}  // namespace ersearch
