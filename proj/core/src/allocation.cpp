#include "skewjoin/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace skewjoin {

CostCurve::CostCurve(const ResidualCost& residual, const OptimizerConfig& config)
    : residual_(&residual), config_(config) {}

const ContinuousSolution& CostCurve::solve(std::uint64_t budget) {
  auto it = cache_.find(budget);
  if (it != cache_.end()) return it->second;
  auto sol = optimize_shares_continuous(residual_->expression, residual_->sizes, static_cast<double>(budget), config_);
  return cache_.emplace(budget, std::move(sol)).first->second;
}

namespace {

constexpr std::uint64_t kExactSpareLimit = 2048;

// Smallest budget in [1, cap] whose expected load is at most `level`; cap + 1 if none.
std::uint64_t budget_for_load(CostCurve& curve, std::uint64_t cap, double level) {
  if (curve.load(cap) > level) return cap + 1;
  std::uint64_t lo = 1, hi = cap;
  while (lo < hi) {
    auto mid = lo + (hi - lo) / 2;
    if (curve.load(mid) <= level) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

// Adds `spares` reducers on top of `base` minimizing sum_i C_i(base_i + extra_i).
std::vector<std::uint64_t> place_spares(std::vector<CostCurve>& curves, const std::vector<std::uint64_t>& base,
                                        std::uint64_t spares) {
  const std::size_t n = curves.size();
  std::vector<std::uint64_t> extra(n, 0);
  if (spares == 0) return extra;
  if (spares > kExactSpareLimit) {
    for (std::uint64_t s = 0; s < spares; ++s) {
      std::size_t best = 0;
      double best_delta = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        double delta = curves[i].cost(base[i] + extra[i] + 1) - curves[i].cost(base[i] + extra[i]);
        if (delta < best_delta) {
          best_delta = delta;
          best = i;
        }
      }
      ++extra[best];
    }
    return extra;
  }

  const auto width = static_cast<std::size_t>(spares) + 1;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> best(width, inf), next(width);
  std::vector<std::vector<std::uint32_t>> choice(n, std::vector<std::uint32_t>(width, 0));
  best[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> cost(width);
    for (std::size_t e = 0; e < width; ++e) cost[e] = curves[i].cost(base[i] + e);
    std::fill(next.begin(), next.end(), inf);
    for (std::size_t used = 0; used < width; ++used) {
      if (best[used] == inf) continue;
      for (std::size_t e = 0; used + e < width; ++e) {
        double v = best[used] + cost[e];
        if (v < next[used + e]) {
          next[used + e] = v;
          choice[i][used + e] = static_cast<std::uint32_t>(e);
        }
      }
    }
    std::swap(best, next);
  }
  std::size_t remaining = spares;
  for (std::size_t i = n; i-- > 0;) {
    extra[i] = choice[i][remaining];
    remaining -= extra[i];
  }
  return extra;
}

}  // namespace

AllocationPlan allocate_reducers(const std::vector<ResidualCost>& residuals, std::uint64_t k,
                                 const OptimizerConfig& config) {
  const auto nonempty =
      static_cast<std::uint64_t>(std::count_if(residuals.begin(), residuals.end(), [](const auto& r) { return !r.empty; }));
  if (k < nonempty) {
    throw AllocationError("k = " + std::to_string(k) + " reducers cannot cover " + std::to_string(nonempty) +
                          " non-empty residual joins");
  }

  AllocationPlan plan;
  plan.total_reducers = k;
  plan.entries.resize(residuals.size());

  std::vector<std::size_t> flexible, single;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    if (residuals[i].empty) continue;
    (residuals[i].expression.share_attributes.empty() ? single : flexible).push_back(i);
  }
  for (auto i : single) plan.entries[i].reducers = 1;
  const std::uint64_t available = k - single.size();

  std::vector<CostCurve> curves;
  curves.reserve(flexible.size());
  for (auto i : flexible) curves.emplace_back(residuals[i], config);

  if (flexible.empty()) {
    // Nothing can use extra reducers; park them on the first residual join so the budget balances.
    if (!single.empty()) plan.entries[single.front()].reducers += available;
  } else {
    const std::uint64_t cap = available - (flexible.size() - 1);
    auto needs = [&](double level) {
      std::vector<std::uint64_t> out;
      for (auto& c : curves) out.push_back(budget_for_load(c, cap, level));
      return out;
    };
    auto fits = [&](double level) {
      std::uint64_t sum = 0;
      for (auto& c : curves) sum += budget_for_load(c, cap, level);
      return sum <= available;
    };

    double hi = 0.0, lo = 0.0;
    for (auto& c : curves) {
      hi = std::max(hi, c.load(1));
      lo = std::max(lo, c.load(cap));
    }
    if (fits(lo)) {
      hi = lo;
    } else {
      for (int iter = 0; iter < 200 && hi - lo > 1e-14 * hi; ++iter) {
        double mid = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) mid = 0.5 * (lo + hi);
        (fits(mid) ? hi : lo) = mid;
      }
    }
    auto base = needs(hi);
    std::uint64_t used = 0;
    for (auto b : base) used += b;
    auto extra = place_spares(curves, base, available - used);
    for (std::size_t j = 0; j < flexible.size(); ++j) plan.entries[flexible[j]].reducers = base[j] + extra[j];
  }

  for (std::size_t j = 0; j < flexible.size(); ++j) {
    auto& entry = plan.entries[flexible[j]];
    entry.continuous = curves[j].solve(entry.reducers);
  }
  for (auto i : single) {
    plan.entries[i].continuous = optimize_shares_continuous(residuals[i].expression, residuals[i].sizes, 1.0, config);
  }
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    if (residuals[i].empty) continue;
    auto& entry = plan.entries[i];
    const std::uint64_t grid = residuals[i].expression.share_attributes.empty() ? 1 : entry.reducers;
    entry.integer = integerize_shares(entry.continuous, residuals[i].expression, residuals[i].sizes, grid, config);
    plan.total_continuous_cost += entry.continuous.cost;
    plan.total_integer_cost += entry.integer.cost;
    plan.max_expected_load =
        std::max(plan.max_expected_load, entry.continuous.cost / static_cast<double>(std::max<std::uint64_t>(grid, 1)));
  }
  return plan;
}

}  // namespace skewjoin
