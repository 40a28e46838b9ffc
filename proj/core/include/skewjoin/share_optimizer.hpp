#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewjoin/cost_model.hpp"

namespace skewjoin {

enum class IntegerizationMode { kExhaustive, kGreedy };

std::string to_string(IntegerizationMode mode);
IntegerizationMode integerization_mode_from_string(const std::string& text);

struct OptimizerConfig {
  /// Relative KKT stationarity threshold.
  double tolerance = 1e-9;
  std::size_t max_iterations = 10'000;
  IntegerizationMode integerization = IntegerizationMode::kExhaustive;
  /// Search nodes the exhaustive integerizer may visit before it falls back to greedy.
  std::size_t exhaustive_node_cap = 5'000'000;

  bool operator==(const OptimizerConfig&) const = default;
};

struct ContinuousSolution {
  ShareAssignment shares;
  double cost = 0.0;
  std::size_t iterations = 0;
  /// Largest violation of the log-space KKT conditions, relative to the cost.
  double kkt_residual = 0.0;
  /// Multiplier of the product constraint in log-share space (d cost / d log budget).
  double multiplier = 0.0;
  /// Share-bearing attributes held at share 1 by the box constraint.
  std::vector<Attribute> clamped;
  bool converged = true;

  bool operator==(const ContinuousSolution&) const = default;
};

struct IntegerSolution {
  IntegerShares shares;
  std::uint64_t cost = 0;
  /// False when the exhaustive search exceeded its node cap and greedy was used.
  bool exhaustive = false;

  bool operator==(const IntegerSolution&) const = default;
};

struct TwoWaySolution {
  double x = 1.0;
  double y = 1.0;
  double cost = 0.0;
};

/// min evaluate_cost subject to product of shares == budget and every share >= 1,
/// solved as a convex program over log-shares with an active-set Newton method.
/// Throws std::invalid_argument for budget < 1, a zero-size relation, or a
/// budget > 1 with no share-bearing attribute. Non-convergence is reported
/// through `converged`, with the best iterate.
ContinuousSolution optimize_shares_continuous(const CostExpression& expression, const SizeMap& sizes, double budget,
                                              const OptimizerConfig& config = {});

/// r*y + s*x under x*y == budget, x and y >= 1.
TwoWaySolution two_way_hh_closed_form(double r, double s, double budget);

/// Integer shares whose product is exactly `budget` (the empty assignment when
/// the expression has no share-bearing attribute). Exhaustive mode is exact.
IntegerSolution integerize_shares(const ContinuousSolution& continuous, const CostExpression& expression,
                                  const SizeMap& sizes, std::uint64_t budget, const OptimizerConfig& config = {});

}  // namespace skewjoin
