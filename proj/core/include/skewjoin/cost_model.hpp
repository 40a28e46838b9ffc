#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "skewjoin/decomposer.hpp"
#include "skewjoin/query.hpp"
#include "skewjoin/relation.hpp"

namespace skewjoin {

/// size(relation) x product of the shares of `variables`.
struct CostTerm {
  std::string relation;
  /// Sorted by attribute name.
  std::vector<Attribute> variables;

  bool operator==(const CostTerm&) const = default;
};

/// Communication-cost posynomial of one (residual) join. There is exactly
/// one term per relation, in query order. `share_attributes` lists the
/// attributes that receive a share; an attribute present in every relation
/// carries a share without appearing in any term.
struct CostExpression {
  std::vector<CostTerm> terms;
  std::vector<Attribute> share_attributes;

  /// Sorted union of the term variables.
  std::vector<Attribute> variables() const;

  /// `r*c + s + t*b`: lowercased relation symbol, then lowercased variables.
  std::string to_string() const;

  bool operator==(const CostExpression&) const = default;
};

/// Attribute -> share. Attributes without an entry have share 1.
template <typename T>
class Shares {
 public:
  Shares() = default;
  Shares(std::initializer_list<std::pair<const Attribute, T>> init) : values_(init) {}

  T get(const Attribute& attribute) const {
    auto it = values_.find(attribute);
    return it == values_.end() ? T{1} : it->second;
  }
  void set(const Attribute& attribute, T share) { values_[attribute] = share; }
  const std::map<Attribute, T>& values() const { return values_; }

  /// Product over all stored shares.
  T product() const {
    T p{1};
    for (const auto& [a, s] : values_) p *= s;
    return p;
  }

  bool operator==(const Shares&) const = default;

 private:
  std::map<Attribute, T> values_;
};

using ShareAssignment = Shares<double>;
using IntegerShares = Shares<std::uint64_t>;

/// One term per relation listing every attribute the relation lacks; no
/// dominance simplification.
CostExpression base_cost_expression(const JoinQuery& query);

/// Base expression with HH-typed attributes fixed to share 1 and, among the
/// remaining ordinary attributes, dominated ones fixed to share 1.
CostExpression residual_cost_expression(const JoinQuery& query, const TypeCombination& combination);

/// Sum over terms of size x product of shares. Throws std::out_of_range when
/// a term's relation has no size.
double evaluate_cost(const CostExpression& expression, const SizeMap& sizes, const ShareAssignment& shares);

/// Integer form of evaluate_cost, used for the exact cost identity.
std::uint64_t evaluate_cost(const CostExpression& expression, const SizeMap& sizes, const IntegerShares& shares);

/// Partition r tuples, broadcast s tuples to all k reducers: r + k*s.
/// Throws std::invalid_argument when r < s or k < 1.
double baseline_cost(std::uint64_t r, std::uint64_t s, std::uint64_t k);

}  // namespace skewjoin
