#include "ersearch/query.h"

#include <fstream>
#include <sstream>

#include "ersearch/error.h"
#include "ersearch/tokenizer.h"
#include "json.hpp"

namespace ersearch {

namespace {

std::string_view KindName(SubQueryKind kind) {
  return kind == SubQueryKind::kEntity ? "entity" : "relationship";
}

ERQuery QueryFromJson(const nlohmann::json &j) {
  std::vector<SubQuery> subqueries;
  for (const auto &sq : j.at("subqueries")) {
    const auto kind = sq.at("kind").get<std::string>();
    auto text = sq.at("terms").get<std::string>();
    if (kind == "entity") {
      subqueries.push_back(SubQuery::Entity(std::move(text)));
    } else if (kind == "relationship") {
      subqueries.push_back(SubQuery::Relationship(std::move(text)));
    } else {
      throw ValidationError("unknown sub-query kind '" + kind + "'");
    }
  }
  return ERQuery(j.at("query_id").get<std::string>(), std::move(subqueries),
                 j.value("natural_language", std::string()));
}

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

SubQuery SubQuery::Entity(std::string text) {
  SubQuery sq{SubQueryKind::kEntity, std::move(text), {}};
  sq.terms = Tokenize(sq.text);
  return sq;
}

SubQuery SubQuery::Relationship(std::string text) {
  SubQuery sq{SubQueryKind::kRelationship, std::move(text), {}};
  sq.terms = Tokenize(sq.text);
  return sq;
}

ERQuery::ERQuery(std::string query_id, std::vector<SubQuery> subqueries,
                 std::string natural_language)
    : id_(std::move(query_id)),
      subqueries_(std::move(subqueries)),
      natural_language_(std::move(natural_language)) {
  const std::string where = "query " + id_ + ": ";
  if (id_.empty() || id_.find_first_of(" \t\r\n") != std::string::npos) {
    throw ValidationError(where + "query_id must be non-empty without whitespace");
  }
  if (subqueries_.empty()) throw ValidationError(where + "no sub-queries");
  if (subqueries_.size() % 2 == 0) {
    throw ValidationError(where + "sub-query count must be odd, got " +
                          std::to_string(subqueries_.size()));
  }
  for (std::size_t i = 0; i < subqueries_.size(); ++i) {
    const auto expected = i % 2 == 0 ? SubQueryKind::kEntity : SubQueryKind::kRelationship;
    if (subqueries_[i].kind != expected) {
      throw ValidationError(where + "sub-query " + std::to_string(i) + " must be " +
                            std::string(KindName(expected)) +
                            " (kinds alternate, starting and ending with entity)");
    }
  }
  for (std::size_t i = 0; i < subqueries_.size(); ++i) {
    if (subqueries_[i].terms.empty()) {
      throw ValidationError(where + "sub-query " + std::to_string(i) + " has no terms");
    }
  }
}

std::vector<ERQuery> ReadQueries(std::istream &in, const std::string &source) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string content = buffer.str();
  std::vector<ERQuery> out;

  auto add = [&](const nlohmann::json &j, std::size_t line) {
    try {
      out.push_back(QueryFromJson(j));
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(source, line, std::string("malformed query: ") + e.what());
    } catch (const ValidationError &e) {
      throw ParseError(source, line, e.what());
    }
  };

  nlohmann::json whole = nlohmann::json::parse(content, nullptr, false);
  if (!whole.is_discarded()) {
    if (whole.is_array()) {
      for (const auto &j : whole) add(j, 0);
    } else if (whole.is_object()) {
      add(whole, 0);
    } else {
      throw ParseError(source, 0, "expected a query object or array");
    }
    return out;
  }

  std::istringstream lines(content);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError(source, line_no, "malformed JSON");
    add(j, line_no);
  }
  return out;
}

std::vector<ERQuery> LoadQueries(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open query file " + path);
  return ReadQueries(in, path);
}

void WriteQueries(std::ostream &out, std::span<const ERQuery> queries) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto &q : queries) {
    nlohmann::ordered_json j;
    j["query_id"] = q.id();
    if (!q.natural_language().empty()) j["natural_language"] = q.natural_language();
    auto &sqs = j["subqueries"] = nlohmann::ordered_json::array();
    for (const auto &sq : q.subqueries()) {
      nlohmann::ordered_json s;
      s["kind"] = KindName(sq.kind);
      s["terms"] = sq.text;
      sqs.push_back(std::move(s));
    }
    arr.push_back(std::move(j));
  }
  out << arr.dump(2) << '\n';
}

ERQuery ParseInlineQuery(std::string query_id, std::string_view text) {
  std::vector<SubQuery> subqueries;
  std::size_t start = 0;
  for (std::size_t i = 0;; ++i) {
    const auto bar = text.find('|', start);
    auto part = Trim(text.substr(start, bar == std::string_view::npos ? bar : bar - start));
    subqueries.push_back(i % 2 == 0 ? SubQuery::Entity(std::move(part))
                                    : SubQuery::Relationship(std::move(part)));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return ERQuery(std::move(query_id), std::move(subqueries));
}

}  // namespace ersearch
