#ifndef ERSEARCH_QUERY_H_
#define ERSEARCH_QUERY_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ersearch {

enum class SubQueryKind { kEntity, kRelationship };

struct SubQuery {
  SubQueryKind kind = SubQueryKind::kEntity;
  std::string text;                // as written in the query file
  std::vector<std::string> terms;  // shared corpus tokenizer applied to text

  static SubQuery Entity(std::string text);
  static SubQuery Relationship(std::string text);
};

// An E-R query: Entity (Relationship Entity)*. Construction validates the
// shape, so every ERQuery has an odd number of sub-queries.
class ERQuery {
 public:
  // Throws ValidationError naming the violated rule.
  ERQuery(std::string query_id, std::vector<SubQuery> subqueries,
          std::string natural_language = {});

  const std::string &id() const { return id_; }
  const std::string &natural_language() const { return natural_language_; }
  std::span<const SubQuery> subqueries() const { return subqueries_; }
  std::size_t size() const { return subqueries_.size(); }

  // Number of entities in an answer tuple, (|Q| + 1) / 2.
  std::size_t arity() const { return (subqueries_.size() + 1) / 2; }
  std::size_t relationship_count() const { return subqueries_.size() / 2; }

  const SubQuery &entity(std::size_t i) const { return subqueries_[2 * i]; }
  // Relationship between entity i and entity i + 1.
  const SubQuery &relationship(std::size_t i) const { return subqueries_[2 * i + 1]; }

 private:
  std::string id_;
  std::vector<SubQuery> subqueries_;
  std::string natural_language_;
};

// Accepts a JSON array of query objects, a single object, or JSON Lines:
// {"query_id": str, "subqueries": [{"kind": "entity"|"relationship",
// "terms": str}], "natural_language": str (optional)}.
std::vector<ERQuery> ReadQueries(std::istream &in, const std::string &source = "<stream>");
std::vector<ERQuery> LoadQueries(const std::string &path);

// Writes a JSON array that ReadQueries accepts.
void WriteQueries(std::ostream &out, std::span<const ERQuery> queries);

// "soccer player | dated | top model": '|' separates alternating sub-queries.
ERQuery ParseInlineQuery(std::string query_id, std::string_view text);

}  // namespace ersearch

#endif  // ERSEARCH_QUERY_H_
