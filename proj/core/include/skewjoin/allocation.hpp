#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "skewjoin/cost_model.hpp"
#include "skewjoin/decomposer.hpp"
#include "skewjoin/share_optimizer.hpp"

namespace skewjoin {

class AllocationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// What the allocator needs to know about one residual join.
struct ResidualCost {
  CostExpression expression;
  SizeMap sizes;
  bool empty = false;
};

struct AllocationEntry {
  /// k_i; 0 for empty residual joins.
  std::uint64_t reducers = 0;
  ContinuousSolution continuous;
  IntegerSolution integer;
};

struct AllocationPlan {
  std::vector<AllocationEntry> entries;
  std::uint64_t total_reducers = 0;
  /// max_i C_i(k_i) / k_i over non-empty residual joins, continuous costs.
  double max_expected_load = 0.0;
  double total_continuous_cost = 0.0;
  std::uint64_t total_integer_cost = 0;
};

/// Continuous optimal cost of one residual join as a function of its
/// reducer budget, memoized per integer budget.
class CostCurve {
 public:
  CostCurve(const ResidualCost& residual, const OptimizerConfig& config);

  const ContinuousSolution& solve(std::uint64_t budget);
  double cost(std::uint64_t budget) { return solve(budget).cost; }
  /// Expected tuples per reducer: cost(budget) / budget.
  double load(std::uint64_t budget) { return cost(budget) / static_cast<double>(budget); }

 private:
  const ResidualCost* residual_;
  OptimizerConfig config_;
  std::map<std::uint64_t, ContinuousSolution> cache_;
};

/// Splits k reducers over the residual joins. Empty residual joins get 0;
/// residual joins without any share-bearing attribute get 1. The rest are
/// sized to minimize the largest expected per-reducer load
/// max_i C_i(k_i) / k_i (bisection on a shared load level); reducers left
/// over after that are placed where they raise sum_i C_i(k_i) least.
/// Throws AllocationError when k is below the number of non-empty residual joins.
AllocationPlan allocate_reducers(const std::vector<ResidualCost>& residuals, std::uint64_t k,
                                 const OptimizerConfig& config = {});

}  // namespace skewjoin
