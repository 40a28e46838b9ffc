#include "skewjoin/plan.hpp"

#include <stdexcept>

namespace skewjoin {

Plan make_plan(const Decomposition& decomposition, const std::vector<ResidualSpec>& specs, std::uint64_t k,
               const OptimizerConfig& config) {
  if (specs.size() != decomposition.size()) {
    throw std::invalid_argument("expected relevant sizes for " + std::to_string(decomposition.size()) +
                                " combinations, got " + std::to_string(specs.size()));
  }
  const auto& query = decomposition.query();
  std::vector<ResidualCost> residuals;
  residuals.reserve(specs.size());
  for (const auto& spec : specs) {
    const auto& c = decomposition.combinations().at(spec.combination);
    residuals.push_back({residual_cost_expression(query, c), spec.relevant_sizes, spec.empty});
  }
  auto allocation = allocate_reducers(residuals, k, config);

  Plan plan{query, decomposition.type_sets(), k, config, {}, allocation.max_expected_load,
            allocation.total_continuous_cost, allocation.total_integer_cost};
  for (std::size_t i = 0; i < specs.size(); ++i) {
    auto& a = allocation.entries[i];
    plan.entries.push_back({decomposition.combinations().at(specs[i].combination), specs[i],
                            std::move(residuals[i].expression), a.reducers, std::move(a.continuous),
                            std::move(a.integer)});
  }
  return plan;
}

Plan make_plan(const Database& db, const JoinQuery& query, const HeavyHitterReport& report, std::uint64_t k,
               const OptimizerConfig& config) {
  Decomposition d(query, report);
  return make_plan(d, residual_specs(db, d), k, config);
}

Plan make_shares_plan(const Database& db, const JoinQuery& query, std::uint64_t k, const OptimizerConfig& config) {
  return make_plan(db, query, HeavyHitterReport{}, k, config);
}

}  // namespace skewjoin
