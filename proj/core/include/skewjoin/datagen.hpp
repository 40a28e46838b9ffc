#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "skewjoin/query.hpp"
#include "skewjoin/relation.hpp"

namespace skewjoin {

struct PlantedValue {
  Attribute attribute;
  Value value;
  /// Exactly floor(fraction * n) tuples carry `value` on `attribute`.
  double fraction = 0.0;
};

struct SkewOptions {
  /// Zipf exponent per attribute; unlisted attributes (or exponent 0) are uniform.
  std::map<Attribute, double> zipf;
  std::vector<PlantedValue> planted;
  std::uint64_t seed = 0;
  /// Size of the value universe {1..universe}; 0 means 10 * n.
  std::uint64_t universe = 0;
};

/// Deterministic given the seed. Throws std::invalid_argument when planted
/// fractions of one attribute are not in (0, 1) or sum to >= 1, or when a
/// planted attribute is not in the schema.
RelationInstance generate_skewed(const RelationSchema& schema, std::uint64_t n, const SkewOptions& options);

/// One instance per relation of `query`. Join attributes draw Zipf with
/// `join_zipf`, other attributes are uniform; every planted value applies to
/// all relations containing its attribute. Relation seeds derive from `seed`.
Database generate_database(const JoinQuery& query, std::uint64_t n, double join_zipf,
                           const std::vector<PlantedValue>& planted, std::uint64_t seed, std::uint64_t universe = 0);

/// Inverse-CDF Zipf sampler over ranks {1..universe}.
class ZipfSampler {
 public:
  ZipfSampler(std::uint64_t universe, double exponent);
  /// Maps a uniform u in [0, 1) to a rank.
  std::uint64_t rank(double u) const;

 private:
  std::vector<double> cdf_;
};

}  // namespace skewjoin
