#include <benchmark/benchmark.h>

#include "skewjoin/cost_model.hpp"
#include "skewjoin/query.hpp"
#include "skewjoin/share_optimizer.hpp"

namespace {

using namespace skewjoin;

const SizeMap kChainSizes{{"R", 40000}, {"S", 25000}, {"T", 60000}};

void BM_ContinuousRunningExample(benchmark::State& state) {
  auto e = base_cost_expression(parse_query("R(A,B); S(B,E,C); T(C,D)"));
  const double budget = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(optimize_shares_continuous(e, kChainSizes, budget));
}
BENCHMARK(BM_ContinuousRunningExample)->Arg(16)->Arg(256)->Arg(4096);

void BM_ContinuousTriangle(benchmark::State& state) {
  auto e = base_cost_expression(parse_query("R1(X1,X2); R2(X2,X3); R3(X3,X1)"));
  const SizeMap sizes{{"R1", 1000}, {"R2", 20000}, {"R3", 300000}};
  for (auto _ : state) benchmark::DoNotOptimize(optimize_shares_continuous(e, sizes, 1000.0));
}
BENCHMARK(BM_ContinuousTriangle);

void BM_Integerize(benchmark::State& state) {
  auto e = base_cost_expression(parse_query("R(A,B); S(B,E,C); T(C,D)"));
  const auto budget = static_cast<std::uint64_t>(state.range(0));
  OptimizerConfig cfg;
  cfg.integerization = state.range(1) ? IntegerizationMode::kGreedy : IntegerizationMode::kExhaustive;
  auto cont = optimize_shares_continuous(e, kChainSizes, static_cast<double>(budget), cfg);
  for (auto _ : state) benchmark::DoNotOptimize(integerize_shares(cont, e, kChainSizes, budget, cfg));
}
BENCHMARK(BM_Integerize)->Args({64, 0})->Args({720, 0})->Args({5040, 0})->Args({5040, 1});

}  // namespace
