#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "skewjoin/datagen.hpp"
#include "skewjoin/hh_detector.hpp"

namespace skewjoin {
namespace {

using testing::make_db;

TEST(DetectHeavyHitters, SmallExampleAtHalf) {
  auto q = testing::two_way();
  auto report = detect_heavy_hitters(testing::small_example_db(), q, 0.5);
  ASSERT_EQ(report.attributes.size(), 1u);
  EXPECT_EQ(report.attributes[0].attribute, "B");
  ASSERT_EQ(report.values_of("B"), (std::vector<Value>{"2"}));
  EXPECT_EQ(report.attributes[0].values[0].counts, (SizeMap{{"R", 3}, {"S", 2}}));
  EXPECT_EQ(report.relation_sizes, (SizeMap{{"R", 3}, {"S", 2}}));
}

TEST(DetectHeavyHitters, ThresholdIsInclusive) {
  auto q = testing::two_way();
  auto db = make_db(q, {{{"1", "x"}, {"2", "x"}, {"3", "y"}, {"4", "z"}}, {{"w", "1"}}});
  EXPECT_EQ(detect_heavy_hitters(db, q, 0.5).values_of("B"), (std::vector<Value>{"x", "w"}));
  // w holds all of S, so it stays heavy even though it never appears in R.
  EXPECT_EQ(detect_heavy_hitters(db, q, 0.51).values_of("B"), (std::vector<Value>{"w"}));
}

TEST(DetectHeavyHitters, IgnoresNonJoinAttributes) {
  auto q = testing::two_way();
  auto db = make_db(q, {{{"1", "x"}, {"1", "y"}, {"1", "z"}}, {{"q", "5"}, {"r", "5"}}});
  // A = 1 fills R and C = 5 fills S, but neither is a join attribute.
  auto report = detect_heavy_hitters(db, q, 0.6);
  EXPECT_EQ(report.total_heavy_hitters(), 0u);
  EXPECT_TRUE(report.values_of("A").empty());
  EXPECT_TRUE(report.values_of("C").empty());
}

TEST(DetectHeavyHitters, FirstAppearanceOrder) {
  auto q = testing::two_way();
  auto db = make_db(q, {{{"1", "m"}, {"2", "k"}, {"3", "m"}, {"4", "k"}}, {{"k", "1"}}});
  EXPECT_EQ(detect_heavy_hitters(db, q, 0.5).values_of("B"), (std::vector<Value>{"m", "k"}));
}

TEST(DetectHeavyHitters, ContentInvariantUnderTupleOrder) {
  auto q = testing::running_example();
  auto db = generate_database(q, 500, 1.1, {{"B", "7", 0.3}, {"C", "9", 0.2}}, 11);
  auto before = detect_heavy_hitters(db, q, 0.1);

  Database shuffled;
  std::mt19937_64 rng(5);
  for (const auto& [name, inst] : db.relations()) {
    auto tuples = inst.tuples();
    std::shuffle(tuples.begin(), tuples.end(), rng);
    shuffled.put(RelationInstance(inst.schema(), tuples));
  }
  auto after = detect_heavy_hitters(shuffled, q, 0.1);
  ASSERT_EQ(before.attributes.size(), after.attributes.size());
  for (std::size_t i = 0; i < before.attributes.size(); ++i) {
    auto key = [](const AttributeHeavyHitters& a) {
      std::map<Value, std::map<std::string, std::uint64_t>> m;
      for (const auto& hh : a.values) m[hh.value] = hh.counts;
      return m;
    };
    EXPECT_EQ(key(before.attributes[i]), key(after.attributes[i]));
  }
}

TEST(DetectHeavyHitters, ThresholdOneOnlyWholeRelation) {
  auto q = testing::two_way();
  auto db = make_db(q, {{{"1", "x"}, {"2", "y"}}, {{"x", "1"}, {"x", "2"}}});
  EXPECT_EQ(detect_heavy_hitters(db, q, 1.0).values_of("B"), (std::vector<Value>{"x"}));
}

TEST(DetectHeavyHitters, RejectsBadThreshold) {
  auto q = testing::two_way();
  auto db = testing::small_example_db();
  EXPECT_THROW(detect_heavy_hitters(db, q, 0.0), std::invalid_argument);
  EXPECT_THROW(detect_heavy_hitters(db, q, 1.5), std::invalid_argument);
  EXPECT_THROW(detect_heavy_hitters(db, q, -0.1), std::invalid_argument);
}

TEST(DetectHeavyHitters, EmptyRelations) {
  auto q = testing::two_way();
  auto report = detect_heavy_hitters(Database::empty_for(q), q, 0.5);
  EXPECT_EQ(report.total_heavy_hitters(), 0u);
}

TEST(DetectHeavyHitters, PlantedValueIsFound) {
  auto q = testing::two_way();
  auto db = generate_database(q, 1000, 0.0, {{"B", "7", 0.5}}, 3);
  auto report = detect_heavy_hitters(db, q, 0.3);
  EXPECT_EQ(report.values_of("B"), (std::vector<Value>{"7"}));
}

TEST(DetectHeavyHitters, UniformDataAtHighThresholdIsEmpty) {
  auto q = testing::two_way();
  auto db = generate_database(q, 1000, 0.0, {}, 17);
  EXPECT_EQ(detect_heavy_hitters(db, q, 0.99).total_heavy_hitters(), 0u);
}

TEST(CountFrequencies, CountsAndUnknownAttribute) {
  auto db = testing::small_example_db();
  auto f = count_frequencies(db.at("S"), "C");
  EXPECT_EQ(f.at("5"), 1u);
  EXPECT_EQ(f.size(), 2u);
  EXPECT_THROW(count_frequencies(db.at("S"), "A"), std::invalid_argument);
}

}  // namespace
}  // namespace skewjoin
