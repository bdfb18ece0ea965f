#include "ersearch/corpus.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>

#include "ersearch/error.h"
#include "ersearch/utf8.h"
#include "json.hpp"

namespace ersearch {

namespace {

using ordered_json = nlohmann::ordered_json;

bool IsSpace(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' ||
         cp == '\v' || cp == 0xA0;
}

bool IsTerminal(char32_t cp) { return cp == '.' || cp == '!' || cp == '?'; }

std::vector<std::size_t> MentionOrder(const AnnotatedDocument &doc) {
  std::vector<std::size_t> order(doc.mentions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return doc.mentions[a].start < doc.mentions[b].start;
  });
  return order;
}

AnnotatedDocument DocumentFromJson(const nlohmann::json &j) {
  AnnotatedDocument doc;
  doc.doc_id = j.at("doc_id").get<std::string>();
  doc.text = j.at("text").get<std::string>();
  if (j.contains("mentions")) {
    for (const auto &m : j.at("mentions")) {
      Mention mention;
      mention.entity_id = m.at("entity_id").get<std::string>();
      mention.start = m.at("start").get<std::size_t>();
      mention.end = m.at("end").get<std::size_t>();
      mention.surface = m.at("surface").get<std::string>();
      doc.mentions.push_back(std::move(mention));
    }
  }
  return doc;
}

}  // namespace

void ValidateDocument(const AnnotatedDocument &doc) {
  if (doc.doc_id.empty()) throw ValidationError("document with empty doc_id");
  const std::u32string text = utf8::Decode(doc.text);
  for (const Mention &m : doc.mentions) {
    const std::string where = "doc " + doc.doc_id + ", mention [" +
                              std::to_string(m.start) + ", " +
                              std::to_string(m.end) + ")";
    if (m.entity_id.empty()) throw ValidationError(where + ": empty entity_id");
    if (std::any_of(m.entity_id.begin(), m.entity_id.end(), [](char c) {
          return c == '|' || std::isspace(static_cast<unsigned char>(c));
        })) {
      throw ValidationError(where + ": entity_id '" + m.entity_id +
                            "' contains whitespace or '|'");
    }
    if (m.start >= m.end) throw ValidationError(where + ": empty span");
    if (m.end > text.size()) {
      throw ValidationError(where + ": end offset " + std::to_string(m.end) +
                            " exceeds text length " +
                            std::to_string(text.size()));
    }
    const std::string span = utf8::Encode(
        std::u32string_view(text).substr(m.start, m.end - m.start));
    if (span != m.surface) {
      throw ValidationError(where + ": surface '" + m.surface +
                            "' does not match text '" + span + "'");
    }
  }
  const auto order = MentionOrder(doc);
  for (std::size_t i = 1; i < order.size(); ++i) {
    const Mention &prev = doc.mentions[order[i - 1]];
    const Mention &cur = doc.mentions[order[i]];
    if (cur.start < prev.end) {
      throw ValidationError("doc " + doc.doc_id + ": mention at " +
                            std::to_string(cur.start) +
                            " overlaps mention ending at " +
                            std::to_string(prev.end));
    }
  }
}

void Corpus::Add(AnnotatedDocument doc) {
  ValidateDocument(doc);
  if (by_id_.count(doc.doc_id)) {
    throw ValidationError("duplicate doc_id " + doc.doc_id);
  }
  by_id_.emplace(doc.doc_id, docs_.size());
  docs_.push_back(std::move(doc));
}

const AnnotatedDocument *Corpus::Find(std::string_view doc_id) const {
  auto it = by_id_.find(std::string(doc_id));
  return it == by_id_.end() ? nullptr : &docs_[it->second];
}

Corpus ReadCorpus(std::istream &in, const std::string &source) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(),
                    [](char c) { return std::isspace(static_cast<unsigned char>(c)); })) {
      continue;
    }
    AnnotatedDocument doc;
    try {
      doc = DocumentFromJson(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(source, line_no, std::string("malformed record: ") + e.what());
    }
    try {
      corpus.Add(std::move(doc));
    } catch (const ValidationError &e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  return corpus;
}

Corpus LoadCorpus(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open corpus file " + path);
  return ReadCorpus(in, path);
}

void WriteCorpus(std::ostream &out, const Corpus &corpus) {
  for (const auto &doc : corpus) {
    ordered_json j;
    j["doc_id"] = doc.doc_id;
    j["text"] = doc.text;
    j["mentions"] = ordered_json::array();
    for (const auto &m : doc.mentions) {
      ordered_json mj;
      mj["entity_id"] = m.entity_id;
      mj["start"] = m.start;
      mj["end"] = m.end;
      mj["surface"] = m.surface;
      j["mentions"].push_back(std::move(mj));
    }
    out << j.dump() << '\n';
  }
}

void SaveCorpus(const std::string &path, const Corpus &corpus) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write corpus file " + path);
  WriteCorpus(out, corpus);
}

std::vector<Sentence> SegmentSentences(const AnnotatedDocument &doc) {
  const std::u32string text = utf8::Decode(doc.text);
  const std::size_t n = text.size();

  std::vector<std::size_t> starts{0};
  for (std::size_t i = 0; i < n; ++i) {
    if (!IsTerminal(text[i])) continue;
    std::size_t k = i + 1;
    if (k < n && !IsSpace(text[k])) continue;
    while (k < n && IsSpace(text[k])) ++k;
    if (k < n && IsUpper(text[k])) starts.push_back(k);
  }

  std::vector<Sentence> sentences(starts.size());
  for (std::size_t s = 0; s < starts.size(); ++s) {
    sentences[s].doc_id = doc.doc_id;
    sentences[s].index = s;
    sentences[s].start = starts[s];
    sentences[s].end = s + 1 < starts.size() ? starts[s + 1] : n;
  }

  // Tokens never contain terminal punctuation, so none straddles a boundary.
  std::size_t s = 0;
  for (auto &token : TokenizeWithOffsets(text)) {
    while (token.start >= sentences[s].end) ++s;
    sentences[s].tokens.push_back(std::move(token));
  }

  for (std::size_t idx : MentionOrder(doc)) {
    const std::size_t start = doc.mentions[idx].start;
    auto it = std::upper_bound(starts.begin(), starts.end(), start);
    sentences[static_cast<std::size_t>(it - starts.begin()) - 1]
        .mention_refs.push_back(idx);
  }
  return sentences;
}

}  // namespace ersearch
