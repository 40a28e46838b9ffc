#pragma once

#include <cstdint>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "skewjoin/query.hpp"
#include "skewjoin/relation.hpp"

namespace skewjoin {

using FrequencyMap = std::unordered_map<Value, std::uint64_t>;

struct HeavyHitter {
  Value value;
  /// Exact count in every relation containing the attribute, including
  /// relations where the value stays below the threshold.
  std::map<std::string, std::uint64_t> counts;

  bool operator==(const HeavyHitter&) const = default;
};

struct AttributeHeavyHitters {
  Attribute attribute;
  /// Ordered by first appearance in the data (relations in query order).
  std::vector<HeavyHitter> values;

  bool operator==(const AttributeHeavyHitters&) const = default;
};

struct HeavyHitterReport {
  double threshold_fraction = 1.0;
  SizeMap relation_sizes;
  /// One entry per join attribute, in query attribute order.
  std::vector<AttributeHeavyHitters> attributes;

  /// HH values of `attribute`, empty when it has none or is not listed.
  std::vector<Value> values_of(std::string_view attribute) const;
  std::size_t total_heavy_hitters() const;

  bool operator==(const HeavyHitterReport&) const = default;
};

/// Multiplicity of each distinct value of `attribute` in `instance`.
FrequencyMap count_frequencies(const RelationInstance& instance, std::string_view attribute);

/// First round of the two-round scheme. A value b of join attribute X is a
/// heavy hitter when count(b) >= threshold * |R| in at least one relation R
/// containing X. Throws std::invalid_argument unless 0 < threshold <= 1.
HeavyHitterReport detect_heavy_hitters(const Database& db, const JoinQuery& query, double threshold);

}  // namespace skewjoin
