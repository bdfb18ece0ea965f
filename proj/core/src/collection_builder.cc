#include "ersearch/collection_builder.h"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include "ersearch/error.h"
#include "ersearch/tokenizer.h"
#include "ersearch/tuple_key.h"
#include "ersearch/utf8.h"
#include "json.hpp"

namespace ersearch {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

const std::unordered_set<std::string> kStopwords = {
    "a",  "an", "and", "as", "at",  "by",   "for",  "from", "in", "into", "is",
    "of", "on", "or",  "the", "to", "with", "its", "that", "this", "was", "were"};

std::string Fold(std::string_view text) {
  std::u32string cps = utf8::Decode(text);
  for (auto &c : cps) c = ToLower(c);
  return utf8::Encode(cps);
}

std::string Normalize(std::string_view text) {
  const auto b = text.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = text.find_last_not_of(" \t\r\n");
  return Fold(text.substr(b, e - b + 1));
}

TableCell CellFromJson(const json &j) {
  if (j.is_string()) return {j.get<std::string>(), std::nullopt};
  TableCell cell{j.value("text", std::string()), std::nullopt};
  if (auto it = j.find("entity_id"); it != j.end() && !it->is_null()) {
    auto id = it->get<std::string>();
    if (!id.empty()) cell.entity_id = std::move(id);
  }
  return cell;
}

SourceTable TableFromJson(const json &j) {
  SourceTable t;
  t.table_id = j.at("table_id").get<std::string>();
  t.page_title = j.value("page_title", std::string());
  t.table_title = j.value("table_title", std::string());
  t.context_paragraph = j.value("context_paragraph", std::string());
  for (const auto &c : j.at("columns")) {
    TableColumn col{c.value("header", std::string()), {}};
    for (const auto &cell : c.at("cells")) col.cells.push_back(CellFromJson(cell));
    t.columns.push_back(std::move(col));
  }
  return t;
}

std::size_t LinkedBoth(const SourceTable &table, std::size_t a, std::size_t b) {
  std::size_t n = 0;
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    n += table.columns[a].cells[r].entity_id && table.columns[b].cells[r].entity_id;
  }
  return n;
}

}  // namespace

void ValidateTable(const SourceTable &table) {
  const std::string where = "table " + table.table_id + ": ";
  if (table.table_id.empty() || table.table_id.find_first_of(" \t\r\n") != std::string::npos) {
    throw ValidationError(where + "table_id must be non-empty without whitespace");
  }
  if (table.columns.size() < 2) throw ValidationError(where + "needs at least 2 columns");
  if (table.row_count() == 0) throw ValidationError(where + "needs at least 1 row");
  for (const auto &c : table.columns) {
    if (c.cells.size() != table.row_count()) {
      throw ValidationError(where + "column '" + c.header + "' has " +
                            std::to_string(c.cells.size()) + " cells, expected " +
                            std::to_string(table.row_count()));
    }
  }
}

std::vector<SourceTable> ReadTables(std::istream &in, const std::string &source) {
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ParseError(source, 0, "malformed JSON");
  if (j.is_object() && j.contains("tables")) j = j["tables"];
  if (!j.is_array()) throw ParseError(source, 0, "expected an array of tables");
  std::vector<SourceTable> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    try {
      out.push_back(TableFromJson(j[i]));
      ValidateTable(out.back());
    } catch (const json::exception &e) {
      throw ParseError(source, 0, "table " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

std::vector<SourceTable> LoadTables(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open tables file " + path);
  return ReadTables(in, path);
}

double UniquenessRatio(const TableColumn &column) {
  if (column.cells.empty()) return 0.0;
  std::set<std::string> distinct;
  for (const auto &c : column.cells) {
    auto n = Normalize(c.text);
    if (!n.empty()) distinct.insert(std::move(n));
  }
  return static_cast<double>(distinct.size()) / static_cast<double>(column.cells.size());
}

std::optional<std::size_t> DetectKeyColumn(const SourceTable &table, double min_ratio) {
  std::optional<std::size_t> best;
  double best_ratio = -1, best_length = 0;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    const auto &col = table.columns[i];
    const double ratio = UniquenessRatio(col);
    double length = 0;
    for (const auto &c : col.cells) length += static_cast<double>(utf8::Length(c.text));
    if (!col.cells.empty()) length /= static_cast<double>(col.cells.size());
    if (ratio > best_ratio || (ratio == best_ratio && length < best_length)) {
      best = i;
      best_ratio = ratio;
      best_length = length;
    }
  }
  if (!best || best_ratio < min_ratio) return std::nullopt;
  return best;
}

std::vector<std::vector<EntityId>> ExtractTuples(const SourceTable &table, std::size_t key_column,
                                                 std::span<const std::size_t> other_columns) {
  std::vector<std::size_t> cols{key_column};
  cols.insert(cols.end(), other_columns.begin(), other_columns.end());
  for (auto c : cols) {
    if (c >= table.columns.size()) throw ValidationError("column index out of range");
  }
  std::vector<std::vector<EntityId>> out;
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    std::vector<EntityId> tuple;
    for (auto c : cols) {
      const auto &cell = table.columns[c].cells[r];
      if (!cell.entity_id) break;
      tuple.push_back(*cell.entity_id);
    }
    if (tuple.size() == cols.size()) out.push_back(std::move(tuple));
  }
  return out;
}

std::vector<std::string> TitleTokens(std::string_view title) {
  std::istringstream in(Fold(title));
  std::vector<std::string> out;
  for (std::string t; in >> t;) {
    if (!kStopwords.count(t)) out.push_back(std::move(t));
  }
  return out;
}

double TitleJaccard(std::string_view a, std::string_view b) {
  const auto ta = TitleTokens(a), tb = TitleTokens(b);
  const std::set<std::string> sa(ta.begin(), ta.end()), sb(tb.begin(), tb.end());
  std::size_t common = 0;
  for (const auto &t : sa) common += sb.count(t);
  const std::size_t uni = sa.size() + sb.size() - common;
  return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

std::vector<std::size_t> SampleTables(std::span<const SourceTable> tables, double threshold,
                                      std::optional<std::uint64_t> seed) {
  std::vector<std::size_t> order(tables.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (seed) {
    std::mt19937_64 rng(*seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::vector<std::size_t> admitted;
  for (auto i : order) {
    bool ok = true;
    for (auto j : admitted) {
      if (TitleJaccard(tables[i].page_title, tables[j].page_title) > threshold) {
        ok = false;
        break;
      }
    }
    if (ok) admitted.push_back(i);
  }
  return admitted;
}

void WriteSkeletons(std::ostream &out, std::span<const QuerySkeleton> skeletons) {
  auto arr = ordered_json::array();
  for (const auto &s : skeletons) {
    ordered_json j;
    j["query_id"] = s.query_id;
    j["table_id"] = s.table_id;
    j["page_title"] = s.page_title;
    j["table_title"] = s.table_title;
    j["context_paragraph"] = s.context_paragraph;
    j["key_column"] = s.key_column;
    j["columns"] = s.columns;
    j["headers"] = s.headers;
    j["tuples"] = s.tuples;
    j["natural_language"] = s.natural_language;
    j["subqueries"] = s.subqueries;
    arr.push_back(std::move(j));
  }
  out << arr.dump(2) << '\n';
}

std::vector<QuerySkeleton> ReadSkeletons(std::istream &in, const std::string &source) {
  json arr = json::parse(in, nullptr, false);
  if (arr.is_discarded() || !arr.is_array()) {
    throw ParseError(source, 0, "expected a JSON array of skeletons");
  }
  std::vector<QuerySkeleton> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto &j = arr[i];
    try {
      QuerySkeleton s;
      s.query_id = j.at("query_id").get<std::string>();
      s.table_id = j.value("table_id", s.query_id);
      s.page_title = j.value("page_title", std::string());
      s.table_title = j.value("table_title", std::string());
      s.context_paragraph = j.value("context_paragraph", std::string());
      s.key_column = j.value("key_column", std::size_t{0});
      s.columns = j.value("columns", std::vector<std::size_t>{});
      s.headers = j.value("headers", std::vector<std::string>{});
      s.tuples = j.at("tuples").get<std::vector<std::vector<EntityId>>>();
      s.natural_language = j.value("natural_language", std::string());
      s.subqueries = j.value("subqueries", std::vector<std::string>{});
      out.push_back(std::move(s));
    } catch (const json::exception &e) {
      throw ParseError(source, 0, "skeleton " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

Collection BuildCollection(std::span<const SourceTable> tables, const CollectionOptions &options) {
  if (options.arity < 2) throw ValidationError("collection arity must be >= 2");
  Collection out;
  for (auto i : SampleTables(tables, options.similarity_threshold, options.shuffle_seed)) {
    const SourceTable &t = tables[i];
    const auto key = DetectKeyColumn(t, options.key_threshold);
    if (!key || t.columns.size() < options.arity) {
      out.skipped.push_back(t.table_id);
      continue;
    }
    std::vector<std::pair<std::size_t, std::size_t>> ranked;  // (linked rows, column)
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      if (c != *key) ranked.emplace_back(LinkedBoth(t, *key, c), c);
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto &a, const auto &b) { return a.first > b.first; });
    std::vector<std::size_t> others;
    for (std::size_t k = 0; k + 1 < options.arity; ++k) others.push_back(ranked[k].second);

    QuerySkeleton s;
    s.query_id = t.table_id;
    s.table_id = t.table_id;
    s.page_title = t.page_title;
    s.table_title = t.table_title;
    s.context_paragraph = t.context_paragraph;
    s.key_column = *key;
    s.columns.push_back(*key);
    s.columns.insert(s.columns.end(), others.begin(), others.end());
    for (auto c : s.columns) s.headers.push_back(t.columns[c].header);
    s.tuples = ExtractTuples(t, *key, others);
    if (s.tuples.empty()) {
      out.skipped.push_back(t.table_id);
      continue;
    }
    for (const auto &tuple : s.tuples) {
      if (std::set<EntityId>(tuple.begin(), tuple.end()).size() != tuple.size()) continue;
      out.qrels.Add(s.query_id, JoinTupleKey(tuple), 1);
    }
    out.skeletons.push_back(std::move(s));
  }
  return out;
}

std::vector<ERQuery> FinalizeSkeletons(std::span<const QuerySkeleton> skeletons) {
  std::vector<ERQuery> out;
  for (const auto &s : skeletons) {
    const std::string where = "skeleton " + s.query_id + ": ";
    if (s.subqueries.empty()) throw ValidationError(where + "sub-queries not filled in");
    const std::size_t width = s.tuples.empty() ? s.columns.size() : s.tuples.front().size();
    if (s.subqueries.size() != 2 * width - 1) {
      throw ValidationError(where + "expected " + std::to_string(2 * width - 1) +
                            " sub-queries for " + std::to_string(width) + "-entity tuples, got " +
                            std::to_string(s.subqueries.size()));
    }
    std::vector<SubQuery> subqueries;
    for (std::size_t i = 0; i < s.subqueries.size(); ++i) {
      subqueries.push_back(i % 2 == 0 ? SubQuery::Entity(s.subqueries[i])
                                      : SubQuery::Relationship(s.subqueries[i]));
    }
    out.emplace_back(s.query_id, std::move(subqueries), s.natural_language);
  }
  return out;
}

}  // namespace ersearch
