#ifndef ERSEARCH_META_INDEX_H_
#define ERSEARCH_META_INDEX_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ersearch {

using TermId = std::uint32_t;
using DocId = std::uint32_t;

// Materialized view of one meta-document (an entity, a pair, or a raw
// document). length == sum of term_freqs.
struct MetaDocument {
  std::string key;
  std::map<std::string, std::uint64_t> term_freqs;
  std::vector<std::vector<std::string>> positional_contexts;
  std::uint64_t length = 0;
};

struct CollectionStats {
  std::uint64_t total_terms = 0;  // |C|
  std::uint64_t doc_count = 0;    // N
  double avg_doc_length = 0.0;    // |C| / N
  double mu = 0.0;                // Dirichlet prior
};

struct UnigramStats {
  std::uint64_t tf = 0;
  std::uint64_t cf = 0;
  std::uint64_t doc_length = 0;
  std::uint64_t total_terms = 0;
  std::uint64_t df = 0;
  std::uint64_t doc_count = 0;
};

struct GramStats {
  std::uint64_t tf = 0;
  std::uint64_t cf = 0;
  std::uint64_t df = 0;
};

// Per-document frequency of one gram (a term, an ordered bigram or an
// unordered window pair) over a whole index part, sorted by document.
class GramPostings {
 public:
  struct Entry {
    DocId doc;
    std::uint32_t tf;
  };

  GramPostings() = default;
  explicit GramPostings(std::vector<Entry> entries);

  std::uint64_t tf(DocId doc) const;
  std::uint64_t cf() const { return cf_; }
  std::uint64_t df() const { return entries_.size(); }
  std::span<const Entry> entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
  std::uint64_t cf_ = 0;
};

// Number of (t1, t2) co-occurrences within `window` tokens in one context:
// occurrences are matched one-to-one greedily left to right, each match
// spanning at most window - 1 positions. For t1 == t2 occurrences pair with
// each other.
std::uint32_t CountUnorderedWindow(std::span<const std::uint32_t> positions_a,
                                   std::span<const std::uint32_t> positions_b,
                                   bool same_term, std::uint32_t window);

// Immutable positional index over a collection of meta-documents. Each
// meta-document is a list of contexts (token lists); phrase and window
// statistics are computed inside a context, never across two.
class MetaIndex {
 public:
  class Builder {
   public:
    void Add(std::string key, std::vector<std::string> context);
    // Keys are ordered lexicographically; contexts keep insertion order.
    // max_contexts_per_key == 0 keeps every context. mu defaults to the
    // average document length.
    MetaIndex Build(std::optional<double> mu = std::nullopt,
                    std::size_t max_contexts_per_key = 0) &&;

   private:
    std::unordered_map<std::string, std::vector<std::vector<std::string>>> docs_;
  };

  MetaIndex() = default;

  std::size_t size() const { return keys_.size(); }
  const std::string &key(DocId doc) const { return keys_[doc]; }
  std::optional<DocId> Find(std::string_view key) const;
  // Throws NotFoundError.
  DocId Require(std::string_view key) const;

  const CollectionStats &stats() const { return stats_; }
  std::uint64_t doc_length(DocId doc) const { return doc_length_[doc]; }

  std::size_t vocabulary_size() const { return terms_.size(); }
  std::optional<TermId> term_id(std::string_view term) const;
  const std::string &term(TermId id) const { return terms_[id]; }
  std::uint64_t cf(TermId id) const { return cf_[id]; }
  std::uint64_t df(TermId id) const { return doc_postings_[id].size(); }
  std::uint64_t tf(DocId doc, TermId id) const;

  // Documents containing the term, with term frequency.
  std::span<const GramPostings::Entry> postings(TermId id) const {
    return doc_postings_[id];
  }

  // Whole-part gram statistics; unknown terms give empty postings.
  GramPostings Unigram(std::string_view term) const;
  GramPostings OrderedBigram(std::string_view t1, std::string_view t2) const;
  GramPostings UnorderedWindow(std::string_view t1, std::string_view t2,
                               std::uint32_t window) const;

  // Keyed lookups. Throw NotFoundError for an unknown key.
  UnigramStats unigram_stats(std::string_view key, std::string_view term) const;
  GramStats ordered_bigram_stats(std::string_view key, std::string_view t1,
                                 std::string_view t2) const;
  // Throws ValidationError if window < 2.
  GramStats unordered_window_stats(std::string_view key, std::string_view t1,
                                   std::string_view t2,
                                   std::uint32_t window = 8) const;

  std::size_t context_count(DocId doc) const {
    return doc_ctx_offsets_[doc + 1] - doc_ctx_offsets_[doc];
  }
  std::span<const TermId> context(DocId doc, std::size_t i) const;

  MetaDocument Materialize(DocId doc) const;

  // JSON snapshot with a format/version header. Reload recomputes every
  // statistic from the stored contexts and the stored mu.
  void Save(std::ostream &out, std::string_view part) const;
  static MetaIndex Load(std::istream &in, const std::string &source);

  bool operator==(const MetaIndex &other) const;

 private:
  struct Position {
    std::uint32_t ctx;
    std::uint32_t pos;
  };

  std::span<const TermId> context_by_global(std::size_t ctx) const {
    return {tokens_.data() + ctx_offsets_[ctx], tokens_.data() + ctx_offsets_[ctx + 1]};
  }
  std::span<const Position> positions_in(TermId id, std::size_t ctx_begin,
                                         std::size_t ctx_end) const;

  std::vector<std::string> keys_;
  std::unordered_map<std::string, DocId> key_index_;
  std::vector<std::string> terms_;
  std::unordered_map<std::string, TermId> term_index_;

  std::vector<TermId> tokens_;
  std::vector<std::size_t> ctx_offsets_{0};
  std::vector<std::size_t> doc_ctx_offsets_{0};
  std::vector<DocId> ctx_doc_;
  std::vector<std::uint64_t> doc_length_;

  std::vector<std::uint64_t> cf_;
  std::vector<std::vector<GramPostings::Entry>> doc_postings_;
  std::vector<std::vector<Position>> positions_;

  CollectionStats stats_;
};

}  // namespace ersearch

#endif  // ERSEARCH_META_INDEX_H_
