#include <optional>

#include "skewjoin/oracle.hpp"

namespace skewjoin::oracle {

namespace {

using Partial = std::vector<std::optional<Value>>;

// Prefer relations that share an attribute with what is already bound, so
// intermediate results stay small on connected queries.
std::vector<std::size_t> join_order(const JoinQuery& query) {
  const auto& rels = query.relations();
  std::vector<std::size_t> order;
  std::vector<bool> used(rels.size(), false);
  std::set<Attribute> bound;
  for (std::size_t step = 0; step < rels.size(); ++step) {
    std::size_t pick = rels.size();
    for (std::size_t i = 0; i < rels.size() && pick == rels.size(); ++i) {
      if (used[i]) continue;
      for (const auto& a : rels[i].attributes()) {
        if (bound.count(a)) {
          pick = i;
          break;
        }
      }
    }
    if (pick == rels.size()) {
      for (std::size_t i = 0; i < rels.size(); ++i) {
        if (!used[i]) {
          pick = i;
          break;
        }
      }
    }
    used[pick] = true;
    order.push_back(pick);
    for (const auto& a : rels[pick].attributes()) bound.insert(a);
  }
  return order;
}

std::set<ResultTuple> join_instances(const JoinQuery& query, const std::vector<const std::vector<Tuple>*>& data) {
  const auto n = query.attributes().size();
  std::vector<Partial> partials{Partial(n)};
  for (auto r : join_order(query)) {
    const auto& schema = query.relations()[r];
    std::vector<std::size_t> pos;
    for (const auto& a : schema.attributes()) pos.push_back(*query.attribute_index(a));
    std::vector<Partial> next;
    for (const auto& p : partials) {
      for (const auto& t : *data[r]) {
        bool ok = true;
        for (std::size_t c = 0; c < pos.size() && ok; ++c) {
          if (p[pos[c]] && *p[pos[c]] != t[c]) ok = false;
        }
        if (!ok) continue;
        Partial q = p;
        for (std::size_t c = 0; c < pos.size(); ++c) q[pos[c]] = t[c];
        next.push_back(std::move(q));
      }
    }
    partials = std::move(next);
  }
  std::set<ResultTuple> out;
  for (const auto& p : partials) {
    ResultTuple row;
    row.reserve(n);
    for (const auto& v : p) row.push_back(*v);
    out.insert(std::move(row));
  }
  return out;
}

}  // namespace

std::set<ResultTuple> nested_loop_join(const Database& db, const JoinQuery& query) {
  std::vector<const std::vector<Tuple>*> data;
  for (const auto& r : query.relations()) data.push_back(&db.at(r.name()).tuples());
  return join_instances(query, data);
}

std::set<ResultTuple> residual_join(const Database& db, const JoinQuery& query, const TypeSets& sets,
                                    const TypeCombination& combination) {
  std::vector<std::vector<Tuple>> filtered;
  for (const auto& r : query.relations()) {
    std::vector<Tuple> keep;
    for (const auto& t : db.at(r.name()).tuples()) {
      if (tuple_matches(sets, combination, r, t)) keep.push_back(t);
    }
    filtered.push_back(std::move(keep));
  }
  std::vector<const std::vector<Tuple>*> data;
  for (const auto& f : filtered) data.push_back(&f);
  return join_instances(query, data);
}

}  // namespace skewjoin::oracle
