#include <algorithm>
#include <stdexcept>

#include "skewjoin/oracle.hpp"

namespace skewjoin::oracle {

std::set<ResultTuple> MaterializedJoin::map_back(const std::set<ResultTuple>& rows) const {
  std::set<ResultTuple> out;
  for (const auto& row : rows) {
    ResultTuple r;
    r.reserve(original_attributes.size());
    for (const auto& a : original_attributes) {
      auto hv = heavy_values.find(a);
      r.push_back(hv != heavy_values.end() ? hv->second : row[*query.attribute_index(a)]);
    }
    out.insert(std::move(r));
  }
  return out;
}

MaterializedJoin materialize_hh_free(const Database& db, const JoinQuery& query, const TypeSets& sets,
                                     const TypeCombination& combination) {
  MaterializedJoin out{query, {}, {}, {}, query.attributes()};
  for (std::size_t i = 0; i < combination.attributes.size(); ++i) {
    if (combination.types[i].is_heavy()) out.heavy_values[combination.attributes[i]] = combination.types[i].value();
  }
  if (out.heavy_values.empty()) throw std::invalid_argument("combination has no heavy-typed attribute");

  std::vector<RelationSchema> schemas;
  std::vector<RelationInstance> instances;
  // Fresh tokens per (heavy attribute, relation), in tuple order without repeats.
  std::map<std::pair<Attribute, std::string>, std::vector<Value>> tokens;

  for (const auto& schema : query.relations()) {
    std::vector<Attribute> attrs;
    std::vector<bool> replaced;
    for (const auto& a : schema.attributes()) {
      bool heavy = out.heavy_values.count(a) > 0;
      replaced.push_back(heavy);
      attrs.push_back(heavy ? a + "_" + schema.name() : a);
      if (heavy) out.renamed[a].push_back(attrs.back());
    }
    RelationSchema fresh_schema(schema.name(), attrs);
    RelationInstance inst(fresh_schema);
    std::size_t ordinal = 0;
    for (const auto& t : db.at(schema.name()).tuples()) {
      if (!tuple_matches(sets, combination, schema, t)) continue;
      ++ordinal;
      std::string rest;
      for (std::size_t c = 0; c < t.size(); ++c) {
        if (replaced[c]) continue;
        if (!rest.empty()) rest += ',';
        rest += t[c];
      }
      if (rest.empty()) rest = std::to_string(ordinal);
      Tuple row = t;
      for (std::size_t c = 0; c < t.size(); ++c) {
        if (!replaced[c]) continue;
        row[c] = t[c] + "." + rest + "." + schema.name();
        auto& list = tokens[{schema.attributes()[c], schema.name()}];
        if (std::find(list.begin(), list.end(), row[c]) == list.end()) list.push_back(row[c]);
      }
      inst.add(std::move(row));
    }
    schemas.push_back(fresh_schema);
    instances.push_back(std::move(inst));
  }

  for (const auto& [attr, fresh] : out.renamed) {
    RelationSchema aux(attr + "_aux", fresh);
    RelationInstance inst(aux);
    std::vector<const std::vector<Value>*> columns;
    for (const auto& schema : query.relations()) {
      if (schema.contains(attr)) columns.push_back(&tokens[{attr, schema.name()}]);
    }
    bool any_empty = false;
    for (auto* col : columns) any_empty = any_empty || col->empty();
    if (!any_empty) {
      // Cartesian product, first column fastest.
      std::vector<std::size_t> digit(columns.size(), 0);
      while (true) {
        Tuple row;
        for (std::size_t c = 0; c < columns.size(); ++c) row.push_back((*columns[c])[digit[c]]);
        inst.add(std::move(row));
        std::size_t c = 0;
        for (; c < columns.size(); ++c) {
          if (++digit[c] < columns[c]->size()) break;
          digit[c] = 0;
        }
        if (c == columns.size()) break;
      }
    }
    schemas.push_back(aux);
    instances.push_back(std::move(inst));
  }

  out.query = JoinQuery(schemas);
  for (auto& inst : instances) out.db.put(std::move(inst));
  return out;
}

}  // namespace skewjoin::oracle
