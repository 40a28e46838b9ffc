#pragma once

#include <cstdint>
#include <vector>

#include "skewjoin/allocation.hpp"
#include "skewjoin/cost_model.hpp"
#include "skewjoin/decomposer.hpp"
#include "skewjoin/hh_detector.hpp"
#include "skewjoin/share_optimizer.hpp"

namespace skewjoin {

/// Everything decided for one residual join.
struct PlanEntry {
  TypeCombination combination;
  ResidualSpec spec;
  CostExpression expression;
  std::uint64_t reducers = 0;
  ContinuousSolution continuous;
  IntegerSolution integer;

  bool operator==(const PlanEntry&) const = default;
};

/// A complete skew-aware execution plan: one entry per type combination.
struct Plan {
  JoinQuery query;
  TypeSets type_sets;
  std::uint64_t total_reducers = 0;
  OptimizerConfig config;
  std::vector<PlanEntry> entries;
  double max_expected_load = 0.0;
  double total_continuous_cost = 0.0;
  std::uint64_t total_integer_cost = 0;

  Decomposition decomposition() const { return Decomposition(query, type_sets); }

  bool operator==(const Plan&) const = default;
};

/// Builds the plan from relevant sizes; works from data or from catalog statistics alike.
Plan make_plan(const Decomposition& decomposition, const std::vector<ResidualSpec>& specs, std::uint64_t k,
               const OptimizerConfig& config = {});

/// detect-free entry point: decompose `db` around `report` and plan it.
Plan make_plan(const Database& db, const JoinQuery& query, const HeavyHitterReport& report, std::uint64_t k,
               const OptimizerConfig& config = {});

/// Plain Shares: the same pipeline with every attribute ordinary.
Plan make_shares_plan(const Database& db, const JoinQuery& query, std::uint64_t k, const OptimizerConfig& config = {});

}  // namespace skewjoin
