#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "skewjoin/allocation.hpp"
#include "skewjoin/cost_model.hpp"
#include "skewjoin/decomposer.hpp"
#include "skewjoin/query.hpp"
#include "skewjoin/relation.hpp"

// Brute-force references. Slow on purpose; nothing here shares code paths
// with the planner or the simulator beyond the data types.
namespace skewjoin::oracle {

/// Natural join by nested loops over the relations, one at a time.
std::set<ResultTuple> nested_loop_join(const Database& db, const JoinQuery& query);

/// The join restricted to tuples that match `combination`.
std::set<ResultTuple> residual_join(const Database& db, const JoinQuery& query, const TypeSets& sets,
                                    const TypeCombination& combination);

class OracleBoundsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ShareSearchResult {
  IntegerShares shares;
  std::uint64_t cost = 0;
  /// Every cost-minimal assignment, in enumeration order.
  std::vector<IntegerShares> optima;
};

inline constexpr std::uint64_t kMaxSearchBudget = 256;
inline constexpr std::size_t kMaxSearchVariables = 5;

/// Enumerates every integer share vector over `expression.share_attributes`
/// whose product is exactly `budget`. Throws OracleBoundsError beyond
/// kMaxSearchBudget or kMaxSearchVariables, or when a budget above 1 has
/// no attribute to go to.
ShareSearchResult exhaustive_share_search(const CostExpression& expression, const SizeMap& sizes, std::uint64_t budget);

struct AllocationOptimum {
  std::vector<std::uint64_t> reducers;
  double max_load = 0.0;
  double total_cost = 0.0;
};

/// Tries every composition of k over the non-empty residual joins (those
/// without share attributes pinned to 1) and keeps the lexicographic
/// minimum of (max expected load, total continuous cost).
AllocationOptimum exhaustive_allocation(const std::vector<ResidualCost>& residuals, std::uint64_t k,
                                        const OptimizerConfig& config = {});

/// A residual join rewritten so that its heavy values disappear: every
/// heavy-typed attribute X of relation R becomes X_R holding one fresh
/// token per tuple, and a relation X_aux joins the fresh attributes through
/// their Cartesian product.
struct MaterializedJoin {
  JoinQuery query;
  Database db;
  /// Original attribute -> the fresh attributes that replaced it.
  std::map<Attribute, std::vector<Attribute>> renamed;
  /// Original attribute -> its heavy value.
  std::map<Attribute, Value> heavy_values;
  /// Attributes of the original query in order.
  std::vector<Attribute> original_attributes;

  /// Maps rows of `query` (its attribute order) back to rows of the
  /// original query by replacing fresh tokens with the heavy value.
  std::set<ResultTuple> map_back(const std::set<ResultTuple>& rows) const;
};

/// Tokens are `<value>.<rest>.<Relation>`, where rest is the tuple's
/// remaining values joined by ','; a tuple with nothing else uses its
/// 1-based ordinal. Throws std::invalid_argument when the combination has no
/// heavy-typed attribute.
MaterializedJoin materialize_hh_free(const Database& db, const JoinQuery& query, const TypeSets& sets,
                                     const TypeCombination& combination);

}  // namespace skewjoin::oracle
