#include "skewjoin/relation.hpp"

#include <stdexcept>

namespace skewjoin {

RelationInstance::RelationInstance(RelationSchema schema, std::vector<Tuple> tuples)
    : schema_(std::move(schema)), tuples_() {
  tuples_.reserve(tuples.size());
  for (auto& t : tuples) add(std::move(t));
}

void RelationInstance::add(Tuple tuple) {
  if (tuple.size() != schema_.arity()) {
    throw std::invalid_argument("tuple of arity " + std::to_string(tuple.size()) + " does not fit relation " +
                                schema_.name() + " of arity " + std::to_string(schema_.arity()));
  }
  tuples_.push_back(std::move(tuple));
}

void Database::put(RelationInstance instance) {
  auto name = instance.name();
  relations_.insert_or_assign(std::move(name), std::move(instance));
}

const RelationInstance& Database::at(std::string_view name) const {
  auto it = relations_.find(name);
  if (it == relations_.end()) throw std::out_of_range("no data for relation " + std::string(name));
  return it->second;
}

bool Database::contains(std::string_view name) const { return relations_.find(name) != relations_.end(); }

Database Database::empty_for(const JoinQuery& query) {
  Database db;
  for (const auto& r : query.relations()) db.put(RelationInstance(r));
  return db;
}

}  // namespace skewjoin
