#include "ersearch/tuple_key.h"

#include <algorithm>

namespace ersearch {

std::string JoinTupleKey(std::span<const EntityId> entities) {
  std::string key;
  for (std::size_t i = 0; i < entities.size(); ++i) {
    if (i) key.push_back('|');
    key += entities[i];
  }
  return key;
}

std::vector<EntityId> SplitTupleKey(std::string_view key) {
  std::vector<EntityId> out;
  std::size_t start = 0;
  while (true) {
    const auto bar = key.find('|', start);
    out.emplace_back(key.substr(start, bar == std::string_view::npos ? bar : bar - start));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return out;
}

std::string CanonicalTupleKey(std::span<const EntityId> entities) {
  std::vector<EntityId> reversed(entities.rbegin(), entities.rend());
  const bool keep = std::lexicographical_compare(entities.begin(), entities.end(),
                                                 reversed.begin(), reversed.end()) ||
                    std::equal(entities.begin(), entities.end(), reversed.begin());
  return keep ? JoinTupleKey(entities) : JoinTupleKey(reversed);
}

std::string CanonicalTupleKey(std::string_view key) {
  return CanonicalTupleKey(SplitTupleKey(key));
}

}  // namespace ersearch
