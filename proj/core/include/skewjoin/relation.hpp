#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "skewjoin/query.hpp"

namespace skewjoin {

/// Atomic values are kept in their literal text form; integers are their
/// decimal representation.
using Value = std::string;
using Tuple = std::vector<Value>;

/// A result row of the full join, one value per query attribute in
/// JoinQuery::attributes() order.
using ResultTuple = std::vector<Value>;

class RelationInstance {
 public:
  explicit RelationInstance(RelationSchema schema, std::vector<Tuple> tuples = {});

  const RelationSchema& schema() const { return schema_; }
  const std::string& name() const { return schema_.name(); }
  const std::vector<Tuple>& tuples() const { return tuples_; }
  std::size_t size() const { return tuples_.size(); }
  bool empty() const { return tuples_.empty(); }

  /// Throws std::invalid_argument on an arity mismatch.
  void add(Tuple tuple);

 private:
  RelationSchema schema_;
  std::vector<Tuple> tuples_;
};

/// Relation instances keyed by relation name.
class Database {
 public:
  Database() = default;

  void put(RelationInstance instance);
  const RelationInstance& at(std::string_view name) const;
  bool contains(std::string_view name) const;
  const std::map<std::string, RelationInstance, std::less<>>& relations() const { return relations_; }

  /// Empty instances for every relation of `query`.
  static Database empty_for(const JoinQuery& query);

 private:
  std::map<std::string, RelationInstance, std::less<>> relations_;
};

/// Relation name -> tuple count.
using SizeMap = std::map<std::string, std::uint64_t>;

}  // namespace skewjoin
