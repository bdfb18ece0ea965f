#include "ersearch/meta_index.h"

#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>

#include "ersearch/error.h"
#include "json.hpp"

namespace ersearch {

namespace {

constexpr const char *kSnapshotFormat = "ersearch-meta-index";
constexpr int kSnapshotVersion = 1;

}  // namespace

GramPostings::GramPostings(std::vector<Entry> entries) : entries_(std::move(entries)) {
  for (const auto &e : entries_) cf_ += e.tf;
}

std::uint64_t GramPostings::tf(DocId doc) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), doc,
                             [](const Entry &e, DocId d) { return e.doc < d; });
  return it != entries_.end() && it->doc == doc ? it->tf : 0;
}

std::uint32_t CountUnorderedWindow(std::span<const std::uint32_t> positions_a,
                                   std::span<const std::uint32_t> positions_b,
                                   bool same_term, std::uint32_t window) {
  const std::uint32_t reach = window - 1;
  std::uint32_t count = 0;
  if (same_term) {
    for (std::size_t i = 0; i + 1 < positions_a.size();) {
      if (positions_a[i + 1] - positions_a[i] <= reach) {
        ++count;
        i += 2;
      } else {
        ++i;
      }
    }
    return count;
  }
  // Unmatched occurrences waiting for a partner; at most one queue is
  // non-empty at any time.
  std::deque<std::uint32_t> open_a, open_b;
  std::size_t i = 0, j = 0;
  while (i < positions_a.size() || j < positions_b.size()) {
    const bool take_a = j == positions_b.size() ||
                        (i < positions_a.size() && positions_a[i] < positions_b[j]);
    const std::uint32_t p = take_a ? positions_a[i++] : positions_b[j++];
    auto &partners = take_a ? open_b : open_a;
    auto &mine = take_a ? open_a : open_b;
    while (!partners.empty() && p - partners.front() > reach) partners.pop_front();
    if (!partners.empty()) {
      partners.pop_front();
      ++count;
    } else {
      mine.push_back(p);
    }
  }
  return count;
}

void MetaIndex::Builder::Add(std::string key, std::vector<std::string> context) {
  docs_[std::move(key)].push_back(std::move(context));
}

MetaIndex MetaIndex::Builder::Build(std::optional<double> mu,
                                    std::size_t max_contexts_per_key) && {
  MetaIndex index;

  index.keys_.reserve(docs_.size());
  for (const auto &[key, _] : docs_) index.keys_.push_back(key);
  std::sort(index.keys_.begin(), index.keys_.end());
  for (DocId d = 0; d < index.keys_.size(); ++d) index.key_index_.emplace(index.keys_[d], d);

  for (auto &[_, contexts] : docs_) {
    if (max_contexts_per_key && contexts.size() > max_contexts_per_key) {
      contexts.resize(max_contexts_per_key);
    }
    for (const auto &ctx : contexts) {
      for (const auto &t : ctx) index.term_index_.emplace(t, 0);
    }
  }
  index.terms_.reserve(index.term_index_.size());
  for (const auto &[t, _] : index.term_index_) index.terms_.push_back(t);
  std::sort(index.terms_.begin(), index.terms_.end());
  for (TermId id = 0; id < index.terms_.size(); ++id) index.term_index_[index.terms_[id]] = id;

  const std::size_t vocab = index.terms_.size();
  index.cf_.assign(vocab, 0);
  index.doc_postings_.resize(vocab);
  index.positions_.resize(vocab);
  index.doc_length_.reserve(index.keys_.size());

  std::vector<std::uint32_t> doc_tf(vocab, 0);
  std::vector<TermId> touched;
  for (DocId d = 0; d < index.keys_.size(); ++d) {
    std::uint64_t length = 0;
    for (const auto &ctx : docs_[index.keys_[d]]) {
      const auto ctx_id = static_cast<std::uint32_t>(index.ctx_offsets_.size() - 1);
      for (std::uint32_t pos = 0; pos < ctx.size(); ++pos) {
        const TermId id = index.term_index_.at(ctx[pos]);
        index.tokens_.push_back(id);
        index.positions_[id].push_back({ctx_id, pos});
        if (doc_tf[id]++ == 0) touched.push_back(id);
      }
      length += ctx.size();
      index.ctx_offsets_.push_back(index.tokens_.size());
      index.ctx_doc_.push_back(d);
    }
    index.doc_ctx_offsets_.push_back(index.ctx_offsets_.size() - 1);
    index.doc_length_.push_back(length);
    for (TermId id : touched) {
      index.doc_postings_[id].push_back({d, doc_tf[id]});
      index.cf_[id] += doc_tf[id];
      doc_tf[id] = 0;
    }
    touched.clear();
  }

  index.stats_.total_terms = index.tokens_.size();
  index.stats_.doc_count = index.keys_.size();
  index.stats_.avg_doc_length =
      index.stats_.doc_count
          ? static_cast<double>(index.stats_.total_terms) / index.stats_.doc_count
          : 0.0;
  index.stats_.mu = mu.value_or(index.stats_.avg_doc_length);
  docs_.clear();
  return index;
}

std::optional<DocId> MetaIndex::Find(std::string_view key) const {
  auto it = key_index_.find(std::string(key));
  if (it == key_index_.end()) return std::nullopt;
  return it->second;
}

DocId MetaIndex::Require(std::string_view key) const {
  auto doc = Find(key);
  if (!doc) throw NotFoundError("unknown key '" + std::string(key) + "'");
  return *doc;
}

std::optional<TermId> MetaIndex::term_id(std::string_view term) const {
  auto it = term_index_.find(std::string(term));
  if (it == term_index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t MetaIndex::tf(DocId doc, TermId id) const {
  const auto &list = doc_postings_[id];
  auto it = std::lower_bound(list.begin(), list.end(), doc,
                             [](const GramPostings::Entry &e, DocId d) { return e.doc < d; });
  return it != list.end() && it->doc == doc ? it->tf : 0;
}

std::span<const TermId> MetaIndex::context(DocId doc, std::size_t i) const {
  return context_by_global(doc_ctx_offsets_[doc] + i);
}

std::span<const MetaIndex::Position> MetaIndex::positions_in(TermId id, std::size_t ctx_begin,
                                                             std::size_t ctx_end) const {
  const auto &list = positions_[id];
  auto lo = std::lower_bound(list.begin(), list.end(), ctx_begin,
                             [](const Position &p, std::size_t c) { return p.ctx < c; });
  auto hi = std::lower_bound(lo, list.end(), ctx_end,
                             [](const Position &p, std::size_t c) { return p.ctx < c; });
  return {lo, hi};
}

GramPostings MetaIndex::Unigram(std::string_view term) const {
  auto id = term_id(term);
  if (!id) return {};
  return GramPostings(doc_postings_[*id]);
}

GramPostings MetaIndex::OrderedBigram(std::string_view t1, std::string_view t2) const {
  auto a = term_id(t1), b = term_id(t2);
  if (!a || !b) return {};
  std::vector<GramPostings::Entry> entries;
  for (const Position &p : positions_[*a]) {
    const auto ctx = context_by_global(p.ctx);
    if (p.pos + 1 >= ctx.size() || ctx[p.pos + 1] != *b) continue;
    const DocId d = ctx_doc_[p.ctx];
    if (!entries.empty() && entries.back().doc == d) {
      ++entries.back().tf;
    } else {
      entries.push_back({d, 1});
    }
  }
  return GramPostings(std::move(entries));
}

GramPostings MetaIndex::UnorderedWindow(std::string_view t1, std::string_view t2,
                                        std::uint32_t window) const {
  if (window < 2) throw ValidationError("unordered window size must be >= 2");
  auto a = term_id(t1), b = term_id(t2);
  if (!a || !b) return {};
  const bool same = *a == *b;
  const auto &pa = positions_[*a];
  const auto &pb = positions_[*b];
  std::vector<GramPostings::Entry> entries;
  std::vector<std::uint32_t> xs, ys;
  std::size_t i = 0, j = 0;
  while (i < pa.size() && j < pb.size()) {
    const std::uint32_t ctx = std::max(pa[i].ctx, pb[j].ctx);
    while (i < pa.size() && pa[i].ctx < ctx) ++i;
    while (j < pb.size() && pb[j].ctx < ctx) ++j;
    if (i == pa.size() || j == pb.size()) break;
    if (pa[i].ctx != ctx || pb[j].ctx != ctx) continue;
    xs.clear();
    ys.clear();
    while (i < pa.size() && pa[i].ctx == ctx) xs.push_back(pa[i++].pos);
    while (j < pb.size() && pb[j].ctx == ctx) ys.push_back(pb[j++].pos);
    const std::uint32_t n = CountUnorderedWindow(xs, ys, same, window);
    if (n == 0) continue;
    const DocId d = ctx_doc_[ctx];
    if (!entries.empty() && entries.back().doc == d) {
      entries.back().tf += n;
    } else {
      entries.push_back({d, n});
    }
  }
  return GramPostings(std::move(entries));
}

UnigramStats MetaIndex::unigram_stats(std::string_view key, std::string_view term) const {
  const DocId d = Require(key);
  UnigramStats s;
  s.doc_length = doc_length_[d];
  s.total_terms = stats_.total_terms;
  s.doc_count = stats_.doc_count;
  if (auto id = term_id(term)) {
    s.tf = tf(d, *id);
    s.cf = cf_[*id];
    s.df = df(*id);
  }
  return s;
}

GramStats MetaIndex::ordered_bigram_stats(std::string_view key, std::string_view t1,
                                          std::string_view t2) const {
  const DocId d = Require(key);
  const GramPostings g = OrderedBigram(t1, t2);
  return {g.tf(d), g.cf(), g.df()};
}

GramStats MetaIndex::unordered_window_stats(std::string_view key, std::string_view t1,
                                            std::string_view t2,
                                            std::uint32_t window) const {
  const DocId d = Require(key);
  const GramPostings g = UnorderedWindow(t1, t2, window);
  return {g.tf(d), g.cf(), g.df()};
}

MetaDocument MetaIndex::Materialize(DocId doc) const {
  MetaDocument out;
  out.key = keys_[doc];
  out.length = doc_length_[doc];
  for (std::size_t c = 0; c < context_count(doc); ++c) {
    std::vector<std::string> ctx;
    for (TermId id : context(doc, c)) {
      ctx.push_back(terms_[id]);
      ++out.term_freqs[terms_[id]];
    }
    out.positional_contexts.push_back(std::move(ctx));
  }
  return out;
}

void MetaIndex::Save(std::ostream &out, std::string_view part) const {
  nlohmann::ordered_json j;
  j["format"] = kSnapshotFormat;
  j["version"] = kSnapshotVersion;
  j["part"] = part;
  j["mu"] = stats_.mu;
  auto &docs = j["docs"] = nlohmann::ordered_json::array();
  for (DocId d = 0; d < keys_.size(); ++d) {
    nlohmann::ordered_json dj;
    dj["key"] = keys_[d];
    auto &contexts = dj["contexts"] = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < context_count(d); ++c) {
      auto &ctx = contexts.emplace_back(nlohmann::ordered_json::array());
      for (TermId id : context(d, c)) ctx.push_back(terms_[id]);
    }
    docs.push_back(std::move(dj));
  }
  out << j.dump() << '\n';
}

MetaIndex MetaIndex::Load(std::istream &in, const std::string &source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(source, 0, std::string("malformed index snapshot: ") + e.what());
  }
  if (j.value("format", "") != kSnapshotFormat) {
    throw ParseError(source, 0, "not an ersearch index snapshot");
  }
  if (j.value("version", 0) != kSnapshotVersion) {
    throw ParseError(source, 0, "unsupported snapshot version " +
                                    std::to_string(j.value("version", 0)));
  }
  try {
    Builder builder;
    for (const auto &doc : j.at("docs")) {
      const auto key = doc.at("key").get<std::string>();
      const auto &contexts = doc.at("contexts");
      if (contexts.empty()) continue;
      for (const auto &ctx : contexts) builder.Add(key, ctx.get<std::vector<std::string>>());
    }
    return std::move(builder).Build(j.at("mu").get<double>());
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(source, 0, std::string("malformed index snapshot: ") + e.what());
  }
}

bool MetaIndex::operator==(const MetaIndex &other) const {
  return keys_ == other.keys_ && terms_ == other.terms_ && tokens_ == other.tokens_ &&
         ctx_offsets_ == other.ctx_offsets_ &&
         doc_ctx_offsets_ == other.doc_ctx_offsets_ &&
         doc_length_ == other.doc_length_ && cf_ == other.cf_ &&
         stats_.total_terms == other.stats_.total_terms &&
         stats_.doc_count == other.stats_.doc_count &&
         stats_.avg_doc_length == other.stats_.avg_doc_length &&
         stats_.mu == other.stats_.mu;
}

}  // namespace ersearch
