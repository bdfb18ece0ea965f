#ifndef ERSEARCH_ER_INDEX_H_
#define ERSEARCH_ER_INDEX_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ersearch/corpus.h"
#include "ersearch/extraction.h"
#include "ersearch/meta_index.h"

namespace ersearch {

enum class IndexPart {
  kEntity,        // entity -> sentence contexts
  kRelationship,  // pair -> separating strings
  kSentencePair,  // pair -> full co-occurrence sentences
  kDocument,      // raw document -> all tokens
};

std::string_view IndexPartName(IndexPart part);
// Throws ValidationError for an unknown name.
IndexPart ParseIndexPart(std::string_view name);

struct IndexConfig {
  std::optional<double> mu_entity;
  std::optional<double> mu_relationship;
  std::optional<double> mu_sentence_pair;
  std::optional<double> mu_document;
  // 0 keeps every extraction of an entity or pair.
  std::size_t max_extractions_per_key = 0;
  // Worker threads for extraction; 0 picks hardware concurrency.
  unsigned threads = 0;
};

// The entity, relationship, sentence-pair and raw-document indexes plus the
// entity -> pair membership table. Immutable after Build/Load.
class ERIndex {
 public:
  // The result does not depend on corpus order or thread count.
  static ERIndex Build(const Corpus &corpus, const IndexConfig &config = {});

  const MetaIndex &part(IndexPart p) const;
  const MetaIndex &entities() const { return entities_; }
  const MetaIndex &relationships() const { return relationships_; }
  const MetaIndex &sentence_pairs() const { return sentence_pairs_; }
  const MetaIndex &documents() const { return documents_; }

  const EntityPair &pair(DocId relationship) const { return pairs_[relationship]; }
  const EntityPair &sentence_pair(DocId doc) const { return sentence_pair_keys_[doc]; }

  // Relationship documents containing the entity; size() is n(E).
  std::span<const DocId> pairs_of(std::string_view entity) const;
  std::size_t membership_count(std::string_view entity) const {
    return pairs_of(entity).size();
  }

  // Distinct entities mentioned in a raw document, sorted.
  std::span<const EntityId> document_entities(DocId doc) const {
    return document_entities_[doc];
  }

  // Writes manifest.json plus one snapshot per part into `dir`.
  void Save(const std::string &dir) const;
  static ERIndex Load(const std::string &dir);

  // CollectionStats of every part as a JSON object string.
  std::string StatsJson() const;

  bool operator==(const ERIndex &other) const;

 private:
  void Finalize();

  MetaIndex entities_;
  MetaIndex relationships_;
  MetaIndex sentence_pairs_;
  MetaIndex documents_;
  std::vector<EntityPair> pairs_;
  std::vector<EntityPair> sentence_pair_keys_;
  std::vector<std::vector<EntityId>> document_entities_;
  std::unordered_map<EntityId, std::vector<DocId>> membership_;
};

}  // namespace ersearch

#endif  // ERSEARCH_ER_INDEX_H_
