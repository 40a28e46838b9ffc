#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "skewjoin/oracle.hpp"
#include "skewjoin/plan.hpp"
#include "skewjoin/simulator.hpp"

namespace skewjoin {
namespace {

ExecutionOptions tagged(std::uint64_t seed) {
  ExecutionOptions o;
  o.seed = seed;
  o.tag_outputs = true;
  return o;
}

TEST(ExecutePlan, RunningExampleMatchesOracle) {
  auto q = testing::running_example();
  auto db = testing::running_example_db();
  auto plan = make_plan(db, q, testing::running_example_report(), 24);
  auto result = execute_plan(db, q, plan, tagged(1));
  EXPECT_EQ(result.output, oracle::nested_loop_join(db, q));
  EXPECT_EQ(result.emitted_rows, result.output.size());
  for (const auto& [row, producers] : result.producers) EXPECT_EQ(producers.size(), 1u);
  EXPECT_EQ(result.trace.communication_cost, predicted_communication(plan));
}

TEST(ExecutePlan, EachRowComesFromItsOwnResidual) {
  auto q = testing::running_example();
  auto db = testing::running_example_db();
  auto plan = make_plan(db, q, testing::running_example_report(), 30);
  auto result = execute_plan(db, q, plan, tagged(4));
  auto d = plan.decomposition();
  for (const auto& [row, producers] : result.producers) {
    EXPECT_EQ(result.trace.reducers[*producers.begin()].key.residual, d.combination_of(row));
  }
}

TEST(ExecutePlan, RandomInstancesMatchOracle) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    auto inst = testing::random_instance(seed);
    auto report = detect_heavy_hitters(inst.db, inst.query, inst.tau);
    Decomposition d(inst.query, report);
    auto specs = residual_specs(inst.db, d);
    std::uint64_t nonempty = 0;
    for (const auto& s : specs) nonempty += s.empty ? 0 : 1;
    auto plan = make_plan(d, specs, std::max(inst.k, nonempty));
    auto result = execute_plan(inst.db, inst.query, plan, tagged(seed));
    EXPECT_EQ(result.output, oracle::nested_loop_join(inst.db, inst.query)) << inst.query.to_string();
    EXPECT_EQ(result.emitted_rows, result.output.size());
    EXPECT_EQ(result.trace.communication_cost, predicted_communication(plan));
  }
}

TEST(ExecutePlan, ThreadingAndSeedDeterminism) {
  auto inst = testing::random_instance(3);
  auto report = detect_heavy_hitters(inst.db, inst.query, inst.tau);
  Decomposition d(inst.query, report);
  auto specs = residual_specs(inst.db, d);
  auto plan = make_plan(d, specs, 64);
  ExecutionOptions single;
  single.single_thread = true;
  single.seed = 5;
  ExecutionOptions multi;
  multi.seed = 5;
  multi.threads = 4;
  auto a = execute_plan(inst.db, inst.query, plan, single);
  auto b = execute_plan(inst.db, inst.query, plan, multi);
  EXPECT_EQ(a.output, b.output);
  ASSERT_EQ(a.trace.reducers.size(), b.trace.reducers.size());
  for (std::size_t i = 0; i < a.trace.reducers.size(); ++i) {
    EXPECT_EQ(a.trace.reducers[i].key, b.trace.reducers[i].key);
    EXPECT_EQ(a.trace.reducers[i].received, b.trace.reducers[i].received);
    EXPECT_EQ(a.trace.reducers[i].output, b.trace.reducers[i].output);
  }
}

TEST(ExecutePlan, ComputeJoinOffKeepsShuffleExact) {
  auto q = testing::running_example();
  auto db = testing::running_example_db();
  auto plan = make_plan(db, q, testing::running_example_report(), 24);
  ExecutionOptions route_only;
  route_only.compute_join = false;
  auto a = execute_plan(db, q, plan, route_only);
  auto b = execute_plan(db, q, plan);
  EXPECT_TRUE(a.output.empty());
  EXPECT_EQ(a.trace.communication_cost, b.trace.communication_cost);
  EXPECT_EQ(a.trace.max_load, b.trace.max_load);
}

TEST(ExecutePlan, EmptyDataGivesZeros) {
  auto q = testing::two_way();
  auto db = Database::empty_for(q);
  auto plan = make_shares_plan(db, q, 8);
  auto result = execute_plan(db, q, plan);
  EXPECT_EQ(result.trace.communication_cost, 0u);
  EXPECT_EQ(result.trace.max_load, 0u);
  EXPECT_TRUE(result.output.empty());
  EXPECT_EQ(predicted_communication(plan), 0u);
}

TEST(ExecutePlan, ReducerCap) {
  auto q = testing::two_way();
  auto db = testing::small_example_db();
  auto plan = make_shares_plan(db, q, 1);
  ExecutionOptions capped;
  capped.max_reducer_tuples = 3;
  EXPECT_THROW(execute_plan(db, q, plan, capped), ReducerOverflow);
  capped.max_reducer_tuples = 5;
  EXPECT_NO_THROW(execute_plan(db, q, plan, capped));
}

TEST(ExecutePlan, PlanForAnotherQueryIsRejected) {
  auto q = testing::two_way();
  auto db = testing::small_example_db();
  auto plan = make_shares_plan(db, q, 4);
  auto other = parse_query("R(A,B); S(B,D)");
  Database db2 = Database::empty_for(other);
  EXPECT_THROW(execute_plan(db2, other, plan), PlanMismatch);
}

TEST(MapTupleToReducers, ReplicatesAlongMissingAttributes) {
  auto q = testing::two_way();
  auto db = testing::small_example_db();
  HeavyHitterReport report;
  report.attributes.push_back({"B", {{"2", {}}}});
  auto plan = make_plan(db, q, report, 7);
  const auto& heavy = plan.entries[1];
  const auto shares = heavy.integer.shares;
  HashFamily h(0);
  auto keys = map_tuple_to_reducers({"1", "2"}, q.relation("R"), plan, 1, h);
  // An R tuple fixes A and is copied to every bucket of C.
  EXPECT_EQ(keys.size(), shares.get("C"));
  EXPECT_THROW(map_tuple_to_reducers({"1", "3"}, q.relation("R"), plan, 1, h), std::logic_error);
}

TEST(BaselineHhExecute, CostAndOutput) {
  auto q = testing::two_way();
  auto db = generate_database(q, 400, 0.0, {{"B", "7", 0.5}}, 2, 400);
  HeavyHitterReport report = detect_heavy_hitters(db, q, 0.3);
  ASSERT_EQ(report.values_of("B"), (std::vector<Value>{"7"}));
  auto result = baseline_hh_execute(db.at("R"), db.at("S"), "B", {"7"}, 16);
  EXPECT_EQ(result.output, oracle::nested_loop_join(db, q));
  // 200 heavy tuples per side: R partitioned, S broadcast.
  EXPECT_EQ(result.trace.communication_cost, 200u + 16 * 200 + 400);
  auto single = baseline_hh_execute(db.at("R"), db.at("S"), "B", {"7"}, 1);
  EXPECT_EQ(single.trace.communication_cost, 800u);
}

TEST(BaselineHhExecute, RejectsNonTwoWayJoin) {
  RelationInstance r(RelationSchema("R", {"A", "B"}));
  RelationInstance s(RelationSchema("S", {"A", "B"}));
  EXPECT_THROW(baseline_hh_execute(r, s, "B", {}, 4), std::invalid_argument);
}

TEST(Measure, SummaryStatistics) {
  ShuffleTrace t;
  t.reducers = {{{0, {0}}, 2, 0}, {{0, {1}}, 4, 0}};
  t.communication_cost = 6;
  t.max_load = 4;
  auto m = measure(t);
  EXPECT_EQ(m.total_communication, 6u);
  EXPECT_EQ(m.max_load, 4u);
  EXPECT_DOUBLE_EQ(m.mean_load, 3.0);
  EXPECT_DOUBLE_EQ(m.stddev_load, 1.0);
  EXPECT_EQ(m.reducers, 2u);
}

TEST(ReducerKey, Text) { EXPECT_EQ((ReducerKey{3, {1, 0}}).to_string(), "J3(1,0)"); }

}  // namespace
}  // namespace skewjoin
