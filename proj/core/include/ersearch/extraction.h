#ifndef ERSEARCH_EXTRACTION_H_
#define ERSEARCH_EXTRACTION_H_

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ersearch/corpus.h"

namespace ersearch {

// Unordered pair of distinct entities, stored in lexicographic order so
// (A, B) and (B, A) are the same value.
class EntityPair {
 public:
  EntityPair(EntityId a, EntityId b);

  // Parses "a|b" in either order.
  static EntityPair FromKey(std::string_view key);

  const EntityId &first() const { return first_; }
  const EntityId &second() const { return second_; }
  bool Contains(std::string_view entity) const {
    return first_ == entity || second_ == entity;
  }
  // The member that is not `entity`; `entity` must be a member.
  const EntityId &Other(std::string_view entity) const {
    return first_ == entity ? second_ : first_;
  }
  std::string Key() const { return first_ + "|" + second_; }

  auto operator<=>(const EntityPair &) const = default;

 private:
  EntityId first_;
  EntityId second_;
};

struct EntityExtraction {
  EntityId entity_id;
  std::string doc_id;
  std::size_t sentence_index = 0;
  std::vector<std::string> context_terms;  // full sentence tokens
};

struct RelationshipExtraction {
  EntityPair pair;
  std::string doc_id;
  std::size_t sentence_index = 0;
  std::vector<std::string> context_terms;
};

enum class PairContext {
  kSeparatingString,  // tokens strictly between the two first mentions
  kFullSentence,      // every token of the sentence
};

// One extraction per distinct entity per sentence.
std::vector<EntityExtraction> ExtractEntityContexts(
    const AnnotatedDocument &doc, std::span<const Sentence> sentences);

// One extraction per unordered pair of distinct entities co-occurring in a
// sentence, delimited by each entity's first mention in that sentence.
std::vector<RelationshipExtraction> ExtractRelationshipContexts(
    const AnnotatedDocument &doc, std::span<const Sentence> sentences,
    PairContext mode = PairContext::kSeparatingString);

// JSON Lines debug dump; records carry "type": "entity" | "relationship".
void WriteExtractions(std::ostream &out,
                      std::span<const EntityExtraction> entities,
                      std::span<const RelationshipExtraction> relationships);

}  // namespace ersearch

#endif  // ERSEARCH_EXTRACTION_H_
