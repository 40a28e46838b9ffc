#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "skewjoin/hh_detector.hpp"
#include "skewjoin/query.hpp"
#include "skewjoin/relation.hpp"

namespace skewjoin {

/// Ordinary, or HeavyHitter(value).
class AttrType {
 public:
  static AttrType ordinary() { return AttrType(); }
  static AttrType heavy(Value value) { return AttrType(std::move(value)); }

  bool is_heavy() const { return heavy_.has_value(); }
  bool is_ordinary() const { return !heavy_; }
  /// Precondition: is_heavy().
  const Value& value() const { return *heavy_; }

  /// "-" for ordinary, else the HH value.
  std::string label() const { return heavy_ ? *heavy_ : std::string("-"); }

  bool operator==(const AttrType&) const = default;

 private:
  AttrType() = default;
  explicit AttrType(Value v) : heavy_(std::move(v)) {}
  std::optional<Value> heavy_;
};

/// L_X for every query attribute, in query attribute order. Each list starts
/// with Ordinary, followed by the HH values of that attribute.
struct TypeSets {
  std::vector<Attribute> attributes;
  std::vector<std::vector<AttrType>> types;

  const std::vector<AttrType>& of(std::string_view attribute) const;
  bool operator==(const TypeSets&) const = default;
};

/// One residual join: a type per query attribute.
struct TypeCombination {
  std::size_t index = 0;
  std::vector<Attribute> attributes;
  std::vector<AttrType> types;

  const AttrType& type_of(std::string_view attribute) const;
  bool all_ordinary() const;
  /// Human-readable form such as `B=b1, C=c1` or `all ordinary`.
  std::string describe() const;

  bool operator==(const TypeCombination&) const = default;
};

class CombinationOverflow : public std::runtime_error {
 public:
  explicit CombinationOverflow(double product)
      : std::runtime_error("type combination count " + std::to_string(product) + " exceeds the configured cap"),
        product_(product) {}
  double product() const { return product_; }

 private:
  double product_;
};

struct ResidualSpec {
  std::size_t combination = 0;
  SizeMap relevant_sizes;
  /// True when some relation contributes no tuples; the residual output is then empty.
  bool empty = false;

  bool operator==(const ResidualSpec&) const = default;
};

inline constexpr std::size_t kDefaultCombinationCap = 1'000'000;

TypeSets type_sets(const JoinQuery& query, const HeavyHitterReport& report);

/// Cartesian product of the type sets. The first attribute varies fastest,
/// so the all-Ordinary combination is index 0 and single-HH combinations of
/// the first HH-bearing attribute follow it.
std::vector<TypeCombination> enumerate_combinations(const TypeSets& sets,
                                                    std::size_t cap = kDefaultCombinationCap);

/// Reference routing predicate: HH-typed attributes must carry exactly the HH
/// value, ordinary-typed attributes must avoid every HH value of the attribute.
bool tuple_matches(const TypeSets& sets, const TypeCombination& combination, const RelationSchema& schema,
                   const Tuple& tuple);

/// Query, type sets and combinations, plus constant-time routing of a tuple
/// to the combinations it belongs to.
class Decomposition {
 public:
  Decomposition(const JoinQuery& query, TypeSets sets, std::size_t cap = kDefaultCombinationCap);
  Decomposition(const JoinQuery& query, const HeavyHitterReport& report, std::size_t cap = kDefaultCombinationCap);

  const JoinQuery& query() const { return query_; }
  const TypeSets& type_sets() const { return sets_; }
  const std::vector<TypeCombination>& combinations() const { return combinations_; }
  std::size_t size() const { return combinations_.size(); }

  /// 0 for an ordinary value, otherwise 1 + position of the HH value.
  std::size_t type_index(std::size_t attribute_position, const Value& value) const;

  /// Type position of `attribute_position` within combination `index`.
  std::size_t digit(std::size_t index, std::size_t attribute_position) const {
    return (index / strides_[attribute_position]) % sets_.types[attribute_position].size();
  }

  /// Indices of all combinations a tuple of `schema` is sent to, ascending.
  std::vector<std::size_t> matching_combinations(const RelationSchema& schema, const Tuple& tuple) const;

  /// The unique combination selected by a full result row.
  std::size_t combination_of(const ResultTuple& row) const;

 private:
  JoinQuery query_;
  TypeSets sets_;
  std::vector<TypeCombination> combinations_;
  std::vector<std::size_t> strides_;
  std::vector<std::unordered_map<Value, std::size_t>> heavy_lookup_;
};

/// Relevant sizes of every combination of `decomposition`, in combination order.
std::vector<ResidualSpec> residual_specs(const Database& db, const Decomposition& decomposition);

}  // namespace skewjoin
