#include "ersearch/er_index.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <thread>

#include "ersearch/error.h"
#include "json.hpp"

namespace ersearch {

namespace {

namespace fs = std::filesystem;

constexpr const char *kManifestFormat = "ersearch-index";
constexpr int kManifestVersion = 1;

struct DocumentExtractions {
  std::vector<EntityExtraction> entities;
  std::vector<RelationshipExtraction> relationships;
  std::vector<RelationshipExtraction> sentence_pairs;
  std::vector<std::string> tokens;
  std::vector<EntityId> entity_ids;
};

DocumentExtractions ExtractDocument(const AnnotatedDocument &doc) {
  DocumentExtractions out;
  const auto sentences = SegmentSentences(doc);
  out.entities = ExtractEntityContexts(doc, sentences);
  out.relationships = ExtractRelationshipContexts(doc, sentences);
  out.sentence_pairs = ExtractRelationshipContexts(doc, sentences, PairContext::kFullSentence);
  for (const auto &s : sentences) {
    for (const auto &t : s.tokens) out.tokens.push_back(t.text);
  }
  for (const auto &m : doc.mentions) out.entity_ids.push_back(m.entity_id);
  std::sort(out.entity_ids.begin(), out.entity_ids.end());
  out.entity_ids.erase(std::unique(out.entity_ids.begin(), out.entity_ids.end()),
                       out.entity_ids.end());
  return out;
}

std::vector<std::vector<EntityId>> LoadDocumentEntities(const fs::path &path,
                                                        const MetaIndex &documents) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(path.string(), 0, e.what());
  }
  std::vector<std::vector<EntityId>> out(documents.size());
  for (const auto &[doc_id, ids] : j.items()) {
    out[documents.Require(doc_id)] = ids.get<std::vector<EntityId>>();
  }
  return out;
}

MetaIndex LoadPart(const fs::path &dir, IndexPart part) {
  const fs::path path = dir / (std::string(IndexPartName(part)) + ".json");
  std::ifstream in(path);
  if (!in) throw Error("missing index part " + path.string());
  return MetaIndex::Load(in, path.string());
}

nlohmann::ordered_json StatsOf(const MetaIndex &index) {
  const auto &s = index.stats();
  nlohmann::ordered_json j;
  j["doc_count"] = s.doc_count;
  j["total_terms"] = s.total_terms;
  j["avg_doc_length"] = s.avg_doc_length;
  j["mu"] = s.mu;
  j["vocabulary_size"] = index.vocabulary_size();
  return j;
}

constexpr IndexPart kAllParts[] = {IndexPart::kEntity, IndexPart::kRelationship,
                                   IndexPart::kSentencePair, IndexPart::kDocument};

}  // namespace

std::string_view IndexPartName(IndexPart part) {
  switch (part) {
    case IndexPart::kEntity: return "entity";
    case IndexPart::kRelationship: return "relationship";
    case IndexPart::kSentencePair: return "sentence_pair";
    case IndexPart::kDocument: return "document";
  }
  return "";
}

IndexPart ParseIndexPart(std::string_view name) {
  for (IndexPart p : kAllParts) {
    if (IndexPartName(p) == name) return p;
  }
  throw ValidationError("unknown index part '" + std::string(name) + "'");
}

ERIndex ERIndex::Build(const Corpus &corpus, const IndexConfig &config) {
  std::vector<const AnnotatedDocument *> docs;
  for (const auto &doc : corpus) docs.push_back(&doc);
  std::sort(docs.begin(), docs.end(),
            [](const auto *a, const auto *b) { return a->doc_id < b->doc_id; });

  std::vector<DocumentExtractions> extracted(docs.size());
  unsigned threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(docs.size())));
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t i = w; i < docs.size(); i += threads) {
          extracted[i] = ExtractDocument(*docs[i]);
        }
      });
    }
  }

  MetaIndex::Builder entity_builder, relationship_builder, sentence_builder, doc_builder;
  ERIndex index;
  std::unordered_map<std::string, std::vector<EntityId>> doc_entities;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    auto &ex = extracted[i];
    for (auto &e : ex.entities) entity_builder.Add(e.entity_id, std::move(e.context_terms));
    for (auto &r : ex.relationships) {
      relationship_builder.Add(r.pair.Key(), std::move(r.context_terms));
    }
    for (auto &r : ex.sentence_pairs) {
      sentence_builder.Add(r.pair.Key(), std::move(r.context_terms));
    }
    doc_builder.Add(docs[i]->doc_id, std::move(ex.tokens));
    doc_entities.emplace(docs[i]->doc_id, std::move(ex.entity_ids));
  }
  const std::size_t cap = config.max_extractions_per_key;
  index.entities_ = std::move(entity_builder).Build(config.mu_entity, cap);
  index.relationships_ = std::move(relationship_builder).Build(config.mu_relationship, cap);
  index.sentence_pairs_ = std::move(sentence_builder).Build(config.mu_sentence_pair, cap);
  index.documents_ = std::move(doc_builder).Build(config.mu_document);
  index.document_entities_.resize(index.documents_.size());
  for (auto &[doc_id, ids] : doc_entities) {
    index.document_entities_[index.documents_.Require(doc_id)] = std::move(ids);
  }
  index.Finalize();
  return index;
}

void ERIndex::Finalize() {
  pairs_.clear();
  membership_.clear();
  for (DocId r = 0; r < relationships_.size(); ++r) {
    pairs_.push_back(EntityPair::FromKey(relationships_.key(r)));
    membership_[pairs_.back().first()].push_back(r);
    membership_[pairs_.back().second()].push_back(r);
  }
  sentence_pair_keys_.clear();
  for (DocId r = 0; r < sentence_pairs_.size(); ++r) {
    sentence_pair_keys_.push_back(EntityPair::FromKey(sentence_pairs_.key(r)));
  }
}

const MetaIndex &ERIndex::part(IndexPart p) const {
  switch (p) {
    case IndexPart::kEntity: return entities_;
    case IndexPart::kRelationship: return relationships_;
    case IndexPart::kSentencePair: return sentence_pairs_;
    case IndexPart::kDocument: return documents_;
  }
  return entities_;
}

std::span<const DocId> ERIndex::pairs_of(std::string_view entity) const {
  auto it = membership_.find(std::string(entity));
  if (it == membership_.end()) return {};
  return it->second;
}

void ERIndex::Save(const std::string &dir) const {
  const fs::path root(dir);
  fs::create_directories(root);
  for (IndexPart p : kAllParts) {
    const fs::path path = root / (std::string(IndexPartName(p)) + ".json");
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    part(p).Save(out, IndexPartName(p));
  }
  nlohmann::ordered_json entities;
  for (DocId d = 0; d < documents_.size(); ++d) {
    entities[documents_.key(d)] = document_entities_[d];
  }
  std::ofstream(root / "document_entities.json") << entities.dump() << '\n';

  nlohmann::ordered_json manifest;
  manifest["format"] = kManifestFormat;
  manifest["version"] = kManifestVersion;
  manifest["parts"] = nlohmann::ordered_json::array();
  for (IndexPart p : kAllParts) manifest["parts"].push_back(IndexPartName(p));
  std::ofstream out(root / "manifest.json");
  if (!out) throw Error("cannot write manifest in " + dir);
  out << manifest.dump(2) << '\n';
}

ERIndex ERIndex::Load(const std::string &dir) {
  const fs::path root(dir);
  std::ifstream in(root / "manifest.json");
  if (!in) throw NotFoundError("missing index: no manifest.json in " + dir);
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    throw ParseError((root / "manifest.json").string(), 0, e.what());
  }
  if (manifest.value("format", "") != kManifestFormat ||
      manifest.value("version", 0) != kManifestVersion) {
    throw ParseError((root / "manifest.json").string(), 0,
                     "unsupported index format or version");
  }
  ERIndex index;
  index.entities_ = LoadPart(root, IndexPart::kEntity);
  index.relationships_ = LoadPart(root, IndexPart::kRelationship);
  index.sentence_pairs_ = LoadPart(root, IndexPart::kSentencePair);
  index.documents_ = LoadPart(root, IndexPart::kDocument);
  index.document_entities_ =
      LoadDocumentEntities(root / "document_entities.json", index.documents_);
  index.Finalize();
  return index;
}

std::string ERIndex::StatsJson() const {
  nlohmann::ordered_json j;
  for (IndexPart p : kAllParts) j[std::string(IndexPartName(p))] = StatsOf(part(p));
  j["entity_pairs"] = pairs_.size();
  return j.dump(2);
}

bool ERIndex::operator==(const ERIndex &other) const {
  return entities_ == other.entities_ && relationships_ == other.relationships_ &&
         sentence_pairs_ == other.sentence_pairs_ && documents_ == other.documents_ &&
         document_entities_ == other.document_entities_;
}

}  // namespace ersearch
