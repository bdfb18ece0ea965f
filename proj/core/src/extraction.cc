#include "ersearch/extraction.h"

#include <algorithm>
#include <ostream>
#include <utility>

#include "ersearch/error.h"
#include "json.hpp"

namespace ersearch {

namespace {

// First mention of each distinct entity in the sentence, in position order.
std::vector<const Mention *> FirstMentions(const AnnotatedDocument &doc,
                                           const Sentence &sentence) {
  std::vector<const Mention *> out;
  for (std::size_t ref : sentence.mention_refs) {
    const Mention &m = doc.mentions[ref];
    bool seen = std::any_of(out.begin(), out.end(), [&](const Mention *p) {
      return p->entity_id == m.entity_id;
    });
    if (!seen) out.push_back(&m);
  }
  return out;
}

std::vector<std::string> TokenTexts(const Sentence &sentence) {
  std::vector<std::string> out;
  out.reserve(sentence.tokens.size());
  for (const auto &t : sentence.tokens) out.push_back(t.text);
  return out;
}

std::vector<std::string> Separating(const Sentence &sentence, const Mention &left,
                                    const Mention &right) {
  std::vector<std::string> out;
  for (const auto &t : sentence.tokens) {
    if (t.start >= left.end && t.end <= right.start) out.push_back(t.text);
  }
  return out;
}

}  // namespace

EntityPair::EntityPair(EntityId a, EntityId b) {
  if (a == b) throw ValidationError("entity pair needs distinct members: " + a);
  if (b < a) std::swap(a, b);
  first_ = std::move(a);
  second_ = std::move(b);
}

EntityPair EntityPair::FromKey(std::string_view key) {
  const auto bar = key.find('|');
  if (bar == std::string_view::npos || key.find('|', bar + 1) != std::string_view::npos) {
    throw ValidationError("pair key must be 'a|b': " + std::string(key));
  }
  return EntityPair(std::string(key.substr(0, bar)), std::string(key.substr(bar + 1)));
}

std::vector<EntityExtraction> ExtractEntityContexts(
    const AnnotatedDocument &doc, std::span<const Sentence> sentences) {
  std::vector<EntityExtraction> out;
  for (const Sentence &sentence : sentences) {
    const auto firsts = FirstMentions(doc, sentence);
    if (firsts.empty()) continue;
    const auto terms = TokenTexts(sentence);
    for (const Mention *m : firsts) {
      out.push_back({m->entity_id, doc.doc_id, sentence.index, terms});
    }
  }
  return out;
}

std::vector<RelationshipExtraction> ExtractRelationshipContexts(
    const AnnotatedDocument &doc, std::span<const Sentence> sentences,
    PairContext mode) {
  std::vector<RelationshipExtraction> out;
  for (const Sentence &sentence : sentences) {
    const auto firsts = FirstMentions(doc, sentence);
    if (firsts.size() < 2) continue;
    std::vector<std::string> full;
    if (mode == PairContext::kFullSentence) full = TokenTexts(sentence);
    for (std::size_t i = 0; i < firsts.size(); ++i) {
      for (std::size_t j = i + 1; j < firsts.size(); ++j) {
        RelationshipExtraction ex{EntityPair(firsts[i]->entity_id, firsts[j]->entity_id),
                                  doc.doc_id, sentence.index, {}};
        ex.context_terms = mode == PairContext::kFullSentence
                               ? full
                               : Separating(sentence, *firsts[i], *firsts[j]);
        out.push_back(std::move(ex));
      }
    }
  }
  return out;
}

void WriteExtractions(std::ostream &out,
                      std::span<const EntityExtraction> entities,
                      std::span<const RelationshipExtraction> relationships) {
  for (const auto &e : entities) {
    nlohmann::ordered_json j;
    j["type"] = "entity";
    j["entity_id"] = e.entity_id;
    j["doc_id"] = e.doc_id;
    j["sentence_index"] = e.sentence_index;
    j["context_terms"] = e.context_terms;
    out << j.dump() << '\n';
  }
  for (const auto &r : relationships) {
    nlohmann::ordered_json j;
    j["type"] = "relationship";
    j["pair"] = {r.pair.first(), r.pair.second()};
    j["doc_id"] = r.doc_id;
    j["sentence_index"] = r.sentence_index;
    j["context_terms"] = r.context_terms;
    out << j.dump() << '\n';
  }
}

}  // namespace ersearch
