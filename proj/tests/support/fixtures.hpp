#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "skewjoin/datagen.hpp"
#include "skewjoin/decomposer.hpp"
#include "skewjoin/hh_detector.hpp"
#include "skewjoin/query.hpp"
#include "skewjoin/relation.hpp"

namespace skewjoin::testing {

// R(A,B) join S(B,E,C) join T(C,D); attribute order A, B, E, C, D.
inline JoinQuery running_example() { return parse_query("R(A,B); S(B,E,C); T(C,D)"); }

inline JoinQuery triangle() { return parse_query("R1(X1,X2); R2(X2,X3); R3(X3,X1)"); }

inline JoinQuery two_way() { return parse_query("R(A,B); S(B,C)"); }

// HHs B = b1, b2 and C = c1.
inline HeavyHitterReport running_example_report() {
  HeavyHitterReport report;
  report.threshold_fraction = 0.25;
  report.attributes.push_back({"B", {{"b1", {}}, {"b2", {}}}});
  report.attributes.push_back({"C", {{"c1", {}}}});
  return report;
}

inline Database make_db(const JoinQuery& q, const std::vector<std::vector<Tuple>>& data) {
  Database db;
  for (std::size_t i = 0; i < q.relations().size(); ++i) db.put(RelationInstance(q.relations()[i], data[i]));
  return db;
}

// Small instance where every residual join of the running example is non-empty.
inline Database running_example_db() {
  auto q = running_example();
  return make_db(q, {
                        {{"a1", "b1"}, {"a2", "b1"}, {"a3", "b2"}, {"a4", "x"}, {"a5", "y"}, {"a6", "x"}},
                        {{"b1", "e1", "c1"},
                         {"b1", "e2", "z"},
                         {"b2", "e3", "c1"},
                         {"b2", "e4", "z"},
                         {"x", "e5", "c1"},
                         {"x", "e6", "z"},
                         {"y", "e7", "w"}},
                        {{"c1", "d1"}, {"c1", "d2"}, {"z", "d3"}, {"w", "d4"}, {"w", "d5"}},
                    });
}

// Small auxiliary-attribute case: R(A,B), S(B,C) all sharing B = 2.
inline Database small_example_db() {
  auto q = two_way();
  return make_db(q, {{{"1", "2"}, {"3", "2"}, {"4", "2"}}, {{"2", "5"}, {"2", "6"}}});
}

struct RandomInstance {
  JoinQuery query;
  Database db;
  std::uint64_t k;
  double tau;
};

// A 2- or 3-relation query with planted heavy values, small enough for the
// nested-loop oracle.
inline RandomInstance random_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  static const std::vector<std::string> queries = {
      "R(A,B); S(B,C)",
      "R(A,B); S(B,C); T(C,D)",
      "R1(X1,X2); R2(X2,X3); R3(X3,X1)",
      "R(A,B,C); S(B,D); T(C,E)",
  };
  auto q = parse_query(queries[rng() % queries.size()]);
  const bool two = q.relations().size() == 2;
  const std::uint64_t n = two ? 200 + rng() % 1800 : 60 + rng() % 240;
  std::vector<PlantedValue> planted;
  for (const auto& a : q.join_attributes()) {
    if (rng() % 3 == 0) continue;
    double f = two ? 0.05 + 0.4 * std::uniform_real_distribution<double>(0, 1)(rng)
                   : 0.05 + 0.15 * std::uniform_real_distribution<double>(0, 1)(rng);
    planted.push_back({a, "h" + a, f});
  }
  const std::uint64_t universe = two ? n : n / 2 + 5;
  auto db = generate_database(q, n, 0.8, planted, rng(), universe);
  std::uint64_t k = 6 + rng() % 59;
  double tau = 0.04 + 0.1 * std::uniform_real_distribution<double>(0, 1)(rng);
  return {q, db, k, tau};
}

}  // namespace skewjoin::testing
