#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "skewjoin/hh_detector.hpp"
#include "skewjoin/oracle.hpp"

namespace skewjoin {
namespace {

using testing::make_db;

TEST(NestedLoopJoin, SmallExampleIsACartesianProduct) {
  auto rows = oracle::nested_loop_join(testing::small_example_db(), testing::two_way());
  EXPECT_EQ(rows.size(), 6u);
  EXPECT_TRUE(rows.count({"3", "2", "6"}));
}

TEST(NestedLoopJoin, DisjointValuesGiveNothing) {
  auto q = testing::two_way();
  EXPECT_TRUE(oracle::nested_loop_join(make_db(q, {{{"1", "x"}}, {{"y", "2"}}}), q).empty());
}

TEST(NestedLoopJoin, TriangleWithOneCycle) {
  auto q = testing::triangle();
  auto db = make_db(q, {{{"1", "2"}, {"1", "3"}}, {{"2", "3"}, {"3", "3"}}, {{"3", "1"}, {"2", "1"}}});
  auto rows = oracle::nested_loop_join(db, q);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(rows.count({"1", "2", "3"}));
  EXPECT_TRUE(rows.count({"1", "3", "3"}));
  auto single = make_db(q, {{{"1", "2"}}, {{"2", "3"}}, {{"3", "1"}}});
  EXPECT_EQ(oracle::nested_loop_join(single, q), (std::set<ResultTuple>{{"1", "2", "3"}}));
}

TEST(NestedLoopJoin, DuplicatesCollapse) {
  auto q = testing::two_way();
  auto rows = oracle::nested_loop_join(make_db(q, {{{"1", "x"}, {"1", "x"}}, {{"x", "2"}}}), q);
  EXPECT_EQ(rows.size(), 1u);
}

TEST(NestedLoopJoin, UnionOfResidualJoinsIsTheJoin) {
  auto q = testing::running_example();
  auto db = testing::running_example_db();
  Decomposition d(q, testing::running_example_report());
  std::set<ResultTuple> all;
  std::size_t total = 0;
  for (const auto& c : d.combinations()) {
    auto part = oracle::residual_join(db, q, d.type_sets(), c);
    total += part.size();
    all.insert(part.begin(), part.end());
  }
  EXPECT_EQ(all, oracle::nested_loop_join(db, q));
  EXPECT_EQ(total, all.size());
}

CostExpression two_way_expression() { return {{{"R", {"Y"}}, {"S", {"X"}}}, {"X", "Y"}}; }

TEST(ExhaustiveShareSearch, TwoWayHasTwoOptima) {
  auto best = oracle::exhaustive_share_search(two_way_expression(), {{"R", 1000}, {"S", 500}}, 16);
  EXPECT_EQ(best.cost, 6000u);
  ASSERT_EQ(best.optima.size(), 2u);
  EXPECT_EQ(best.optima[0], (IntegerShares{{"X", 4}, {"Y", 4}}));
  EXPECT_EQ(best.optima[1], (IntegerShares{{"X", 8}, {"Y", 2}}));
}

TEST(ExhaustiveShareSearch, BudgetOneAndSingleVariable) {
  auto one = oracle::exhaustive_share_search(two_way_expression(), {{"R", 3}, {"S", 4}}, 1);
  EXPECT_EQ(one.cost, 7u);
  EXPECT_EQ(one.shares.product(), 1u);
  CostExpression single{{{"R", {}}, {"S", {"X"}}}, {"X"}};
  auto s = oracle::exhaustive_share_search(single, {{"R", 3}, {"S", 4}}, 9);
  EXPECT_EQ(s.shares.get("X"), 9u);
  EXPECT_EQ(s.cost, 3u + 36);
}

TEST(ExhaustiveShareSearch, Bounds) {
  EXPECT_THROW(oracle::exhaustive_share_search(two_way_expression(), {{"R", 1}, {"S", 1}}, 257),
               oracle::OracleBoundsError);
  CostExpression wide{{{"R", {}}}, {"A", "B", "C", "D", "E", "F"}};
  EXPECT_THROW(oracle::exhaustive_share_search(wide, {{"R", 1}}, 4), oracle::OracleBoundsError);
  CostExpression none{{{"R", {}}}, {}};
  EXPECT_THROW(oracle::exhaustive_share_search(none, {{"R", 1}}, 4), oracle::OracleBoundsError);
}

class SmallExample : public ::testing::Test {
 protected:
  JoinQuery q = testing::two_way();
  Database db = testing::small_example_db();
  Decomposition d{q, detect_heavy_hitters(db, q, 0.5)};
};

TEST_F(SmallExample, MaterializedDatabaseIsTheExpectedLayout) {
  auto m = oracle::materialize_hh_free(db, q, d.type_sets(), d.combinations()[1]);
  EXPECT_EQ(m.query.to_string(), "R(A,B_R); S(B_S,C); B_aux(B_R,B_S)");
  EXPECT_EQ(m.db.at("R").tuples(), (std::vector<Tuple>{{"1", "2.1.R"}, {"3", "2.3.R"}, {"4", "2.4.R"}}));
  EXPECT_EQ(m.db.at("S").tuples(), (std::vector<Tuple>{{"2.5.S", "5"}, {"2.6.S", "6"}}));
  EXPECT_EQ(m.db.at("B_aux").tuples(), (std::vector<Tuple>{{"2.1.R", "2.5.S"},
                                                           {"2.3.R", "2.5.S"},
                                                           {"2.4.R", "2.5.S"},
                                                           {"2.1.R", "2.6.S"},
                                                           {"2.3.R", "2.6.S"},
                                                           {"2.4.R", "2.6.S"}}));
  EXPECT_EQ(m.renamed.at("B"), (std::vector<Attribute>{"B_R", "B_S"}));
}

TEST_F(SmallExample, RoundTripEqualsResidualJoin) {
  auto m = oracle::materialize_hh_free(db, q, d.type_sets(), d.combinations()[1]);
  auto expected = oracle::residual_join(db, q, d.type_sets(), d.combinations()[1]);
  EXPECT_EQ(expected.size(), 6u);
  EXPECT_EQ(m.map_back(oracle::nested_loop_join(m.db, m.query)), expected);
}

TEST_F(SmallExample, MaterializedDatabaseHasNoHeavyHitters) {
  auto m = oracle::materialize_hh_free(db, q, d.type_sets(), d.combinations()[1]);
  for (const auto* rel : {"R", "S"}) {
    for (const auto& [v, c] : count_frequencies(m.db.at(rel), m.db.at(rel).schema().attributes()[rel[0] == 'R' ? 1 : 0])) {
      EXPECT_EQ(c, 1u) << v;
    }
  }
}

TEST_F(SmallExample, OrdinaryCombinationIsRejected) {
  EXPECT_THROW(oracle::materialize_hh_free(db, q, d.type_sets(), d.combinations()[0]), std::invalid_argument);
}

TEST(Materialize, RoundTripOnRunningExample) {
  auto q = testing::running_example();
  auto db = testing::running_example_db();
  Decomposition d(q, testing::running_example_report());
  for (std::size_t i = 1; i < d.size(); ++i) {
    auto m = oracle::materialize_hh_free(db, q, d.type_sets(), d.combinations()[i]);
    EXPECT_EQ(m.map_back(oracle::nested_loop_join(m.db, m.query)),
              oracle::residual_join(db, q, d.type_sets(), d.combinations()[i]))
        << d.combinations()[i].describe();
  }
}

TEST(ExhaustiveAllocation, SmallCase) {
  std::vector<ResidualCost> residuals{
      {CostExpression{{{"R", {}}, {"S", {}}}, {"B"}}, {{"R", 10}, {"S", 10}}},
      {CostExpression{{{"R", {"C"}}, {"S", {"A"}}}, {"A", "C"}}, {{"R", 100}, {"S", 100}}},
  };
  auto best = oracle::exhaustive_allocation(residuals, 5);
  // Heavy residual with 4 reducers: 2*sqrt(4*100*100) = 400, load 100; light one 20 on 1.
  EXPECT_EQ(best.reducers, (std::vector<std::uint64_t>{1, 4}));
  EXPECT_NEAR(best.max_load, 100.0, 1e-6);
  EXPECT_NEAR(best.total_cost, 420.0, 1e-6);
}

}  // namespace
}  // namespace skewjoin
