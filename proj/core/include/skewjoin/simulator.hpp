#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewjoin/hashing.hpp"
#include "skewjoin/plan.hpp"
#include "skewjoin/relation.hpp"

namespace skewjoin {

/// A reducer: residual join index plus one bucket per grid attribute of that
/// residual join (attributes with integer share > 1, sorted by name).
struct ReducerKey {
  std::size_t residual = 0;
  std::vector<std::uint64_t> buckets;

  std::string to_string() const;
  auto operator<=>(const ReducerKey&) const = default;
};

struct ReducerLoad {
  ReducerKey key;
  std::uint64_t received = 0;
  std::uint64_t output = 0;
};

struct ResidualTrace {
  std::size_t combination = 0;
  std::vector<Attribute> grid_attributes;
  std::vector<std::uint64_t> grid_shares;
  /// Copies sent per relation into this residual join.
  SizeMap copies;
  SizeMap relevant_sizes;
};

struct ShuffleTrace {
  /// Every reducer of every grid, including idle ones, in key order.
  std::vector<ReducerLoad> reducers;
  std::vector<ResidualTrace> residuals;
  SizeMap copies_per_relation;
  std::uint64_t communication_cost = 0;
  std::uint64_t max_load = 0;
};

struct ExecutionOptions {
  std::uint64_t seed = 0;
  bool single_thread = false;
  /// Route only; skip the per-reducer joins (loads and costs are still exact).
  bool compute_join = true;
  /// Record which reducers produced each result row.
  bool tag_outputs = false;
  /// Per-reducer input cap in tuples; 0 disables the check.
  std::uint64_t max_reducer_tuples = 0;
  /// Worker threads for the reducer joins; 0 means hardware concurrency.
  unsigned threads = 0;
};

struct ExecutionResult {
  ShuffleTrace trace;
  /// Duplicate-free union of all reducer outputs.
  std::set<ResultTuple> output;
  /// Sum over reducers of their distinct output rows; equals output.size()
  /// exactly when no row comes from two reducers.
  std::uint64_t emitted_rows = 0;
  /// Only with tag_outputs: row -> distinct producing reducers (indices into trace.reducers).
  std::map<ResultTuple, std::set<std::size_t>> producers;
};

class ReducerOverflow : public std::runtime_error {
 public:
  explicit ReducerOverflow(const ReducerKey& key, std::uint64_t cap)
      : std::runtime_error("reducer " + key.to_string() + " exceeded its input cap of " + std::to_string(cap) +
                           " tuples"),
        key_(key) {}
  const ReducerKey& key() const { return key_; }

 private:
  ReducerKey key_;
};

class PlanMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reducers of plan entry `entry` that receive tuple `tuple` of `schema`.
/// Throws std::logic_error when the tuple does not belong to the entry's combination.
std::vector<ReducerKey> map_tuple_to_reducers(const Tuple& tuple, const RelationSchema& schema, const Plan& plan,
                                              std::size_t entry, const HashFamily& hashes);

/// Runs the plan on `db`: routes every tuple to its residual joins' grids,
/// joins inside each reducer, and records the shuffle.
ExecutionResult execute_plan(const Database& db, const JoinQuery& query, const Plan& plan,
                             const ExecutionOptions& options = {});

/// Classic skew join for R(.., B, ..) join S(.., B, ..): for each HH value the
/// larger side is hash-partitioned on its non-join attributes into k buckets
/// and the smaller side is broadcast to all k; other tuples go to h(B) mod k.
/// Residual index 0 holds the ordinary reducers, 1 + i those of hh_values[i].
ExecutionResult baseline_hh_execute(const RelationInstance& r, const RelationInstance& s, const Attribute& join_attribute,
                                    const std::vector<Value>& hh_values, std::uint64_t k,
                                    const ExecutionOptions& options = {});

struct Metrics {
  std::uint64_t total_communication = 0;
  /// Per residual join: relation -> copies / relevant size.
  std::vector<std::map<std::string, double>> replication;
  std::uint64_t max_load = 0;
  double mean_load = 0.0;
  double stddev_load = 0.0;
  std::size_t reducers = 0;
};

Metrics measure(const ShuffleTrace& trace);

/// sum over non-empty entries of evaluate_cost(expression, relevant sizes, integer shares).
std::uint64_t predicted_communication(const Plan& plan);

}  // namespace skewjoin
