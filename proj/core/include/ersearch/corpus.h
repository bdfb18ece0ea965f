#ifndef ERSEARCH_CORPUS_H_
#define ERSEARCH_CORPUS_H_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ersearch/tokenizer.h"

namespace ersearch {

using EntityId = std::string;

// An entity annotation. Offsets are code points into the document text.
struct Mention {
  EntityId entity_id;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string surface;

  bool operator==(const Mention &) const = default;
};

struct AnnotatedDocument {
  std::string doc_id;
  std::string text;  // UTF-8
  std::vector<Mention> mentions;

  bool operator==(const AnnotatedDocument &) const = default;
};

struct Sentence {
  std::string doc_id;
  std::size_t index = 0;
  // Code-point span. Sentences of one document partition its text.
  std::size_t start = 0;
  std::size_t end = 0;
  std::vector<Token> tokens;
  // Indices into AnnotatedDocument::mentions, ordered by mention start.
  std::vector<std::size_t> mention_refs;
};

// Throws ValidationError if a mention is out of bounds, empty, overlaps
// another mention, has a surface that differs from the text span, or has an
// entity id that is empty or contains whitespace or '|'.
void ValidateDocument(const AnnotatedDocument &doc);

// Validated, immutable-after-load document collection.
class Corpus {
 public:
  Corpus() = default;

  // Validates and appends. Throws ValidationError on a duplicate doc_id.
  void Add(AnnotatedDocument doc);

  std::size_t size() const { return docs_.size(); }
  bool empty() const { return docs_.empty(); }
  const AnnotatedDocument &operator[](std::size_t i) const { return docs_[i]; }
  const std::vector<AnnotatedDocument> &documents() const { return docs_; }
  auto begin() const { return docs_.begin(); }
  auto end() const { return docs_.end(); }

  const AnnotatedDocument *Find(std::string_view doc_id) const;

 private:
  std::vector<AnnotatedDocument> docs_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

// JSON Lines: {"doc_id": str, "text": str, "mentions": [{"entity_id": str,
// "start": int, "end": int, "surface": str}]}. Blank lines are skipped.
Corpus ReadCorpus(std::istream &in, const std::string &source = "<stream>");
Corpus LoadCorpus(const std::string &path);

void WriteCorpus(std::ostream &out, const Corpus &corpus);
void SaveCorpus(const std::string &path, const Corpus &corpus);

// Rule-based splitter: a sentence ends at '.', '!' or '?' followed by
// whitespace and an uppercase letter, or by end of text. Every mention is
// assigned to the sentence containing its start offset.
std::vector<Sentence> SegmentSentences(const AnnotatedDocument &doc);

}  // namespace ersearch

#endif  // ERSEARCH_CORPUS_H_
