#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "skewjoin/oracle.hpp"

namespace skewjoin::oracle {

namespace {

std::uint64_t direct_cost(const CostExpression& expression, const SizeMap& sizes, const IntegerShares& shares) {
  std::uint64_t total = 0;
  for (const auto& term : expression.terms) {
    std::uint64_t c = sizes.at(term.relation);
    for (const auto& v : term.variables) c *= shares.get(v);
    total += c;
  }
  return total;
}

}  // namespace

ShareSearchResult exhaustive_share_search(const CostExpression& expression, const SizeMap& sizes, std::uint64_t budget) {
  const auto& vars = expression.share_attributes;
  if (budget < 1 || budget > kMaxSearchBudget) {
    throw OracleBoundsError("budget " + std::to_string(budget) + " outside [1, " + std::to_string(kMaxSearchBudget) + "]");
  }
  if (vars.size() > kMaxSearchVariables) {
    throw OracleBoundsError(std::to_string(vars.size()) + " share attributes exceed the search bound");
  }
  if (vars.empty() && budget > 1) throw OracleBoundsError("budget above 1 with no share attributes");

  ShareSearchResult best;
  best.cost = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> current(vars.size(), 1);

  std::function<void(std::size_t, std::uint64_t)> visit = [&](std::size_t i, std::uint64_t remaining) {
    if (i + 1 >= vars.size()) {
      if (!vars.empty()) current[i] = remaining;
      IntegerShares s;
      for (std::size_t j = 0; j < vars.size(); ++j) s.set(vars[j], current[j]);
      auto c = direct_cost(expression, sizes, s);
      if (c < best.cost) {
        best.cost = c;
        best.shares = s;
        best.optima.clear();
      }
      if (c == best.cost) best.optima.push_back(std::move(s));
      return;
    }
    for (std::uint64_t d = 1; d <= remaining; ++d) {
      if (remaining % d != 0) continue;
      current[i] = d;
      visit(i + 1, remaining / d);
    }
  };
  visit(0, budget);
  return best;
}

AllocationOptimum exhaustive_allocation(const std::vector<ResidualCost>& residuals, std::uint64_t k,
                                        const OptimizerConfig& config) {
  std::vector<std::size_t> flexible, single;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    if (residuals[i].empty) continue;
    (residuals[i].expression.share_attributes.empty() ? single : flexible).push_back(i);
  }
  if (k < flexible.size() + single.size()) throw std::invalid_argument("k below the number of non-empty residual joins");

  AllocationOptimum best;
  best.reducers.assign(residuals.size(), 0);
  best.max_load = std::numeric_limits<double>::infinity();
  best.total_cost = std::numeric_limits<double>::infinity();

  double fixed_cost = 0.0, fixed_load = 0.0;
  for (auto i : single) {
    double c = 0.0;
    for (const auto& [r, n] : residuals[i].sizes) c += static_cast<double>(n);
    fixed_cost += c;
    fixed_load = std::max(fixed_load, c);
    best.reducers[i] = 1;
  }
  if (flexible.empty()) {
    if (!single.empty()) best.reducers[single.front()] += k - single.size();
    best.max_load = fixed_load;
    best.total_cost = fixed_cost;
    return best;
  }

  std::vector<std::map<std::uint64_t, double>> memo(flexible.size());
  auto cost_of = [&](std::size_t j, std::uint64_t b) {
    auto it = memo[j].find(b);
    if (it != memo[j].end()) return it->second;
    const auto& r = residuals[flexible[j]];
    double c = optimize_shares_continuous(r.expression, r.sizes, static_cast<double>(b), config).cost;
    memo[j].emplace(b, c);
    return c;
  };

  const std::uint64_t available = k - single.size();
  std::vector<std::uint64_t> parts(flexible.size(), 0);
  std::function<void(std::size_t, std::uint64_t)> visit = [&](std::size_t j, std::uint64_t remaining) {
    if (j + 1 == flexible.size()) {
      parts[j] = remaining;
      double load = fixed_load, total = fixed_cost;
      for (std::size_t t = 0; t < parts.size(); ++t) {
        double c = cost_of(t, parts[t]);
        total += c;
        load = std::max(load, c / static_cast<double>(parts[t]));
      }
      const double tol = 1e-9 * std::max(1.0, best.max_load);
      bool better = load < best.max_load - tol ||
                    (load <= best.max_load + tol && total < best.total_cost - 1e-9 * std::max(1.0, total));
      if (better) {
        best.max_load = load;
        best.total_cost = total;
        for (std::size_t t = 0; t < parts.size(); ++t) best.reducers[flexible[t]] = parts[t];
      }
      return;
    }
    const std::uint64_t left_for_rest = flexible.size() - j - 1;
    for (std::uint64_t b = 1; b + left_for_rest <= remaining; ++b) {
      parts[j] = b;
      visit(j + 1, remaining - b);
    }
  };
  visit(0, available);
  return best;
}

}  // namespace skewjoin::oracle
