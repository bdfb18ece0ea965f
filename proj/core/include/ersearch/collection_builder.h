#ifndef ERSEARCH_COLLECTION_BUILDER_H_
#define ERSEARCH_COLLECTION_BUILDER_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ersearch/corpus.h"
#include "ersearch/eval.h"
#include "ersearch/query.h"

namespace ersearch {

struct TableCell {
  std::string text;
  std::optional<EntityId> entity_id;
};

struct TableColumn {
  std::string header;
  std::vector<TableCell> cells;
};

struct SourceTable {
  std::string table_id;
  std::string page_title;
  std::string table_title;
  std::string context_paragraph;
  std::vector<TableColumn> columns;

  std::size_t row_count() const { return columns.empty() ? 0 : columns[0].cells.size(); }
};

// Throws ValidationError unless the table is rectangular with >= 2 columns
// and >= 1 row and its id is non-empty without whitespace.
void ValidateTable(const SourceTable &table);

// A JSON array of tables or {"tables": [...]}. A cell is {"text", "entity_id"}
// or a bare string. Tables are validated.
std::vector<SourceTable> ReadTables(std::istream &in, const std::string &source = "<stream>");
std::vector<SourceTable> LoadTables(const std::string &path);

// Distinct non-empty cell texts (case-folded, trimmed) over the row count.
double UniquenessRatio(const TableColumn &column);

// Highest uniqueness ratio, shorter average cell text on ties, then the
// leftmost column. nullopt when the best ratio is below min_ratio.
std::optional<std::size_t> DetectKeyColumn(const SourceTable &table, double min_ratio = 0.8);

// One tuple per row whose key cell and every other cell is entity-linked, in
// row order: key entity first, then the other columns in the given order.
std::vector<std::vector<EntityId>> ExtractTuples(const SourceTable &table, std::size_t key_column,
                                                 std::span<const std::size_t> other_columns);

// Lowercase whitespace tokens with stopwords removed.
std::vector<std::string> TitleTokens(std::string_view title);
// Set Jaccard of the title tokens; 0 when both sets are empty.
double TitleJaccard(std::string_view a, std::string_view b);

// Greedy pass: a table is admitted iff its page title has Jaccard <=
// threshold with every admitted title. With a seed the input order is
// shuffled first. Returns admitted indices in admission order.
std::vector<std::size_t> SampleTables(std::span<const SourceTable> tables, double threshold = 0.7,
                                      std::optional<std::uint64_t> seed = std::nullopt);

// Editor input: the candidate answers of one table plus the fields an editor
// fills in to turn it into a query.
struct QuerySkeleton {
  std::string query_id;
  std::string table_id;
  std::string page_title;
  std::string table_title;
  std::string context_paragraph;
  std::size_t key_column = 0;
  std::vector<std::size_t> columns;  // key column first
  std::vector<std::string> headers;  // of columns
  std::vector<std::vector<EntityId>> tuples;
  // Editor fields.
  std::string natural_language;
  std::vector<std::string> subqueries;  // alternating entity / relationship text
};

void WriteSkeletons(std::ostream &out, std::span<const QuerySkeleton> skeletons);
std::vector<QuerySkeleton> ReadSkeletons(std::istream &in,
                                         const std::string &source = "<stream>");

struct CollectionOptions {
  double similarity_threshold = 0.7;
  double key_threshold = 0.8;
  std::size_t arity = 2;  // columns per tuple
  std::optional<std::uint64_t> shuffle_seed;
};

struct Collection {
  std::vector<QuerySkeleton> skeletons;
  Qrels qrels;  // every extracted tuple judged relevant (grade 1)
  std::vector<std::string> skipped;  // table ids without a usable key or tuples
};

// Samples the tables, detects key columns, pairs each key column with the
// arity - 1 columns holding the most fully linked rows and extracts tuples.
Collection BuildCollection(std::span<const SourceTable> tables,
                           const CollectionOptions &options = {});

// Turns editor-completed skeletons into queries. Throws ValidationError for a
// skeleton without sub-queries or whose sub-query count does not match its
// tuple width.
std::vector<ERQuery> FinalizeSkeletons(std::span<const QuerySkeleton> skeletons);

}  // namespace ersearch

#endif  // ERSEARCH_COLLECTION_BUILDER_H_
