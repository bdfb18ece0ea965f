#ifndef ERSEARCH_TUPLE_KEY_H_
#define ERSEARCH_TUPLE_KEY_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ersearch/corpus.h"

namespace ersearch {

// Entity ids joined by '|' in sub-query order.
std::string JoinTupleKey(std::span<const EntityId> entities);
std::vector<EntityId> SplitTupleKey(std::string_view key);

// Relationships are symmetric, so a chain and its reversal answer the same
// need: the canonical form is the lexicographically smaller of the two. For
// pairs this is the sorted pair.
std::string CanonicalTupleKey(std::span<const EntityId> entities);
std::string CanonicalTupleKey(std::string_view key);

}  // namespace ersearch

#endif  // ERSEARCH_TUPLE_KEY_H_
