#include "skewjoin/decomposer.hpp"

#include <algorithm>
#include <stdexcept>

namespace skewjoin {

const std::vector<AttrType>& TypeSets::of(std::string_view attribute) const {
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (attributes[i] == attribute) return types[i];
  }
  throw std::out_of_range("no type set for attribute " + std::string(attribute));
}

const AttrType& TypeCombination::type_of(std::string_view attribute) const {
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (attributes[i] == attribute) return types[i];
  }
  throw std::out_of_range("combination has no attribute " + std::string(attribute));
}

bool TypeCombination::all_ordinary() const {
  return std::all_of(types.begin(), types.end(), [](const AttrType& t) { return t.is_ordinary(); });
}

std::string TypeCombination::describe() const {
  std::string out;
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (types[i].is_ordinary()) continue;
    if (!out.empty()) out += ", ";
    out += attributes[i] + "=" + types[i].value();
  }
  return out.empty() ? "all ordinary" : out;
}

TypeSets type_sets(const JoinQuery& query, const HeavyHitterReport& report) {
  TypeSets sets;
  for (const auto& attr : query.attributes()) {
    std::vector<AttrType> types{AttrType::ordinary()};
    for (auto& v : report.values_of(attr)) types.push_back(AttrType::heavy(std::move(v)));
    sets.attributes.push_back(attr);
    sets.types.push_back(std::move(types));
  }
  return sets;
}

std::vector<TypeCombination> enumerate_combinations(const TypeSets& sets, std::size_t cap) {
  double product = 1.0;
  for (const auto& t : sets.types) {
    if (t.empty()) throw std::invalid_argument("empty type set");
    product *= static_cast<double>(t.size());
  }
  if (product > static_cast<double>(cap)) throw CombinationOverflow(product);

  const auto total = static_cast<std::size_t>(product);
  std::vector<TypeCombination> out;
  out.reserve(total);
  std::vector<std::size_t> digit(sets.types.size(), 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    TypeCombination c;
    c.index = idx;
    c.attributes = sets.attributes;
    c.types.reserve(digit.size());
    for (std::size_t i = 0; i < digit.size(); ++i) c.types.push_back(sets.types[i][digit[i]]);
    out.push_back(std::move(c));
    for (std::size_t i = 0; i < digit.size(); ++i) {
      if (++digit[i] < sets.types[i].size()) break;
      digit[i] = 0;
    }
  }
  return out;
}

bool tuple_matches(const TypeSets& sets, const TypeCombination& combination, const RelationSchema& schema,
                   const Tuple& tuple) {
  for (std::size_t col = 0; col < schema.arity(); ++col) {
    const auto& attr = schema.attributes()[col];
    const auto& type = combination.type_of(attr);
    const auto& value = tuple[col];
    if (type.is_heavy()) {
      if (value != type.value()) return false;
    } else {
      for (const auto& t : sets.of(attr)) {
        if (t.is_heavy() && t.value() == value) return false;
      }
    }
  }
  return true;
}

Decomposition::Decomposition(const JoinQuery& query, TypeSets sets, std::size_t cap)
    : query_(query), sets_(std::move(sets)) {
  if (sets_.attributes != query_.attributes()) {
    throw std::invalid_argument("type sets do not cover the query attributes in order");
  }
  combinations_ = enumerate_combinations(sets_, cap);
  strides_.resize(sets_.types.size());
  std::size_t stride = 1;
  for (std::size_t i = 0; i < sets_.types.size(); ++i) {
    strides_[i] = stride;
    stride *= sets_.types[i].size();
  }
  heavy_lookup_.resize(sets_.types.size());
  for (std::size_t i = 0; i < sets_.types.size(); ++i) {
    for (std::size_t j = 1; j < sets_.types[i].size(); ++j) heavy_lookup_[i].emplace(sets_.types[i][j].value(), j);
  }
}

Decomposition::Decomposition(const JoinQuery& query, const HeavyHitterReport& report, std::size_t cap)
    : Decomposition(query, skewjoin::type_sets(query, report), cap) {}

std::size_t Decomposition::type_index(std::size_t attribute_position, const Value& value) const {
  const auto& lookup = heavy_lookup_[attribute_position];
  if (lookup.empty()) return 0;
  auto it = lookup.find(value);
  return it == lookup.end() ? 0 : it->second;
}

std::vector<std::size_t> Decomposition::matching_combinations(const RelationSchema& schema,
                                                              const Tuple& tuple) const {
  const std::size_t n = sets_.types.size();
  std::vector<bool> fixed(n, false);
  std::size_t base = 0;
  for (std::size_t col = 0; col < schema.arity(); ++col) {
    auto pos = *query_.attribute_index(schema.attributes()[col]);
    fixed[pos] = true;
    base += type_index(pos, tuple[col]) * strides_[pos];
  }
  std::vector<std::size_t> out{base};
  for (std::size_t pos = 0; pos < n; ++pos) {
    if (fixed[pos] || sets_.types[pos].size() == 1) continue;
    std::vector<std::size_t> next;
    next.reserve(out.size() * sets_.types[pos].size());
    for (auto b : out) {
      for (std::size_t d = 0; d < sets_.types[pos].size(); ++d) next.push_back(b + d * strides_[pos]);
    }
    out = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t Decomposition::combination_of(const ResultTuple& row) const {
  std::size_t idx = 0;
  for (std::size_t pos = 0; pos < sets_.types.size(); ++pos) idx += type_index(pos, row[pos]) * strides_[pos];
  return idx;
}

std::vector<ResidualSpec> residual_specs(const Database& db, const Decomposition& decomposition) {
  const auto& query = decomposition.query();
  const auto& sets = decomposition.type_sets();
  std::vector<ResidualSpec> specs(decomposition.size());
  for (std::size_t i = 0; i < specs.size(); ++i) specs[i].combination = i;

  for (const auto& schema : query.relations()) {
    // Local code: mixed radix over this relation's own attributes.
    std::vector<std::size_t> positions;
    std::vector<std::size_t> local_stride;
    std::size_t local_total = 1;
    for (const auto& a : schema.attributes()) {
      auto pos = *query.attribute_index(a);
      positions.push_back(pos);
      local_stride.push_back(local_total);
      local_total *= sets.types[pos].size();
    }
    std::vector<std::uint64_t> counts(local_total, 0);
    for (const auto& t : db.at(schema.name()).tuples()) {
      std::size_t code = 0;
      for (std::size_t col = 0; col < positions.size(); ++col) {
        code += decomposition.type_index(positions[col], t[col]) * local_stride[col];
      }
      ++counts[code];
    }
    for (const auto& c : decomposition.combinations()) {
      std::size_t code = 0;
      for (std::size_t col = 0; col < positions.size(); ++col) {
        auto pos = positions[col];
        code += decomposition.digit(c.index, pos) * local_stride[col];
      }
      specs[c.index].relevant_sizes[schema.name()] = counts[code];
    }
  }
  for (auto& s : specs) {
    s.empty = std::any_of(s.relevant_sizes.begin(), s.relevant_sizes.end(), [](const auto& kv) { return kv.second == 0; });
  }
  return specs;
}

}  // namespace skewjoin
