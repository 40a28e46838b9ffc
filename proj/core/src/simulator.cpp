#include "skewjoin/simulator.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "skewjoin/decomposer.hpp"

namespace skewjoin {

std::string ReducerKey::to_string() const {
  std::string out = "J" + std::to_string(residual) + "(";
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(buckets[i]);
  }
  return out + ")";
}

namespace {

// Reducer grid of one residual join. Row-major: the last grid attribute has
// stride 1, so linear cell order equals lexicographic bucket order.
struct Grid {
  std::size_t entry = 0;
  std::vector<Attribute> attributes;
  std::vector<std::uint64_t> shares;
  std::vector<std::uint64_t> strides;
  std::vector<std::uint64_t> hash_keys;
  std::uint64_t cells = 1;
  std::size_t offset = 0;
  // Per query relation: column of each grid attribute, or -1 when absent.
  std::vector<std::vector<long>> columns;

  Grid(const Plan& plan, std::size_t entry_index, const HashFamily& hashes) : entry(entry_index) {
    const auto& e = plan.entries.at(entry_index);
    for (const auto& [attr, share] : e.integer.shares.values()) {
      if (share <= 1) continue;
      attributes.push_back(attr);
      shares.push_back(share);
      hash_keys.push_back(hashes.key(e.combination.index, attr));
    }
    strides.assign(shares.size(), 1);
    for (std::size_t d = shares.size(); d-- > 0;) {
      strides[d] = cells;
      cells *= shares[d];
    }
    for (const auto& r : plan.query.relations()) {
      std::vector<long> cols;
      for (const auto& a : attributes) {
        auto idx = r.index_of(a);
        cols.push_back(idx ? static_cast<long>(*idx) : -1L);
      }
      columns.push_back(std::move(cols));
    }
  }

  // Cells (local linear ids) receiving `tuple` of query relation `rel`.
  void route(std::size_t rel, const Tuple& tuple, const HashFamily& hashes, std::vector<std::uint64_t>& out) const {
    out.assign(1, 0);
    const auto& cols = columns[rel];
    for (std::size_t d = 0; d < attributes.size(); ++d) {
      if (cols[d] >= 0) {
        auto b = hashes.bucket(hash_keys[d], tuple[static_cast<std::size_t>(cols[d])], shares[d]);
        for (auto& c : out) c += b * strides[d];
      }
    }
    for (std::size_t d = 0; d < attributes.size(); ++d) {
      if (cols[d] >= 0) continue;
      const auto n = out.size();
      out.reserve(n * shares[d]);
      for (std::uint64_t b = 1; b < shares[d]; ++b) {
        for (std::size_t i = 0; i < n; ++i) out.push_back(out[i] + b * strides[d]);
      }
    }
  }

  ReducerKey key(std::uint64_t cell, std::size_t residual) const {
    ReducerKey k{residual, {}};
    for (std::size_t d = 0; d < attributes.size(); ++d) k.buckets.push_back((cell / strides[d]) % shares[d]);
    return k;
  }
};

using Inbox = std::vector<std::vector<const Tuple*>>;  // per query relation

void append_key(std::string& key, const Value& v) {
  key += std::to_string(v.size());
  key += ':';
  key += v;
}

// Hash join of one reducer's inputs over the relations in query order.
std::vector<ResultTuple> join_inbox(const JoinQuery& query, const Inbox& inbox) {
  const auto& relations = query.relations();
  for (const auto& in : inbox) {
    if (in.empty()) return {};
  }
  const std::size_t width = query.attributes().size();
  std::vector<std::vector<std::size_t>> positions;
  for (const auto& r : relations) {
    std::vector<std::size_t> pos;
    for (const auto& a : r.attributes()) pos.push_back(*query.attribute_index(a));
    positions.push_back(std::move(pos));
  }

  std::vector<bool> bound(width, false);
  std::vector<std::vector<const Value*>> rows;
  rows.reserve(inbox[0].size());
  for (const Tuple* t : inbox[0]) {
    std::vector<const Value*> row(width, nullptr);
    for (std::size_t c = 0; c < t->size(); ++c) row[positions[0][c]] = &(*t)[c];
    rows.push_back(std::move(row));
  }
  for (auto p : positions[0]) bound[p] = true;

  for (std::size_t j = 1; j < relations.size() && !rows.empty(); ++j) {
    std::vector<std::size_t> shared_cols, fresh_cols;
    for (std::size_t c = 0; c < positions[j].size(); ++c) {
      (bound[positions[j][c]] ? shared_cols : fresh_cols).push_back(c);
    }
    std::unordered_map<std::string, std::vector<const Tuple*>> table;
    std::string key;
    for (const Tuple* t : inbox[j]) {
      key.clear();
      for (auto c : shared_cols) append_key(key, (*t)[c]);
      table[key].push_back(t);
    }
    std::vector<std::vector<const Value*>> next;
    for (const auto& row : rows) {
      key.clear();
      for (auto c : shared_cols) append_key(key, *row[positions[j][c]]);
      auto it = table.find(key);
      if (it == table.end()) continue;
      for (const Tuple* t : it->second) {
        auto extended = row;
        for (auto c : fresh_cols) extended[positions[j][c]] = &(*t)[c];
        next.push_back(std::move(extended));
      }
    }
    rows = std::move(next);
    for (auto p : positions[j]) bound[p] = true;
  }

  std::vector<ResultTuple> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    ResultTuple r;
    r.reserve(width);
    for (const Value* v : row) r.push_back(*v);
    out.push_back(std::move(r));
  }
  // Duplicate input tuples yield duplicate rows; a reducer reports each row once.
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Runs the reducer joins and assembles the result from routed inboxes.
ExecutionResult finish(const JoinQuery& query, std::vector<ReducerKey> keys, const std::vector<Inbox>& inboxes,
                       const ExecutionOptions& options) {
  ExecutionResult result;
  auto& trace = result.trace;
  trace.reducers.resize(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    trace.reducers[i].key = std::move(keys[i]);
    std::uint64_t received = 0;
    for (const auto& in : inboxes[i]) received += in.size();
    trace.reducers[i].received = received;
    trace.max_load = std::max(trace.max_load, received);
  }
  if (!options.compute_join) return result;

  std::vector<std::vector<ResultTuple>> outputs(inboxes.size());
  unsigned workers = options.single_thread ? 1u
                                           : (options.threads ? options.threads
                                                              : std::max(1u, std::thread::hardware_concurrency()));
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(inboxes.size(), 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < inboxes.size(); ++i) outputs[i] = join_inbox(query, inboxes[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        try {
          for (std::size_t i = next++; i < inboxes.size(); i = next++) outputs[i] = join_inbox(query, inboxes[i]);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  for (std::size_t i = 0; i < outputs.size(); ++i) {
    trace.reducers[i].output = outputs[i].size();
    result.emitted_rows += outputs[i].size();
    for (auto& row : outputs[i]) {
      if (options.tag_outputs) result.producers[row].insert(i);
      result.output.insert(std::move(row));
    }
  }
  return result;
}

void check_cap(const Inbox& inbox, const ReducerKey& key, const ExecutionOptions& options) {
  if (options.max_reducer_tuples == 0) return;
  std::uint64_t n = 0;
  for (const auto& in : inbox) n += in.size();
  if (n > options.max_reducer_tuples) throw ReducerOverflow(key, options.max_reducer_tuples);
}

}  // namespace

std::vector<ReducerKey> map_tuple_to_reducers(const Tuple& tuple, const RelationSchema& schema, const Plan& plan,
                                              std::size_t entry, const HashFamily& hashes) {
  const auto& e = plan.entries.at(entry);
  if (!tuple_matches(plan.type_sets, e.combination, schema, tuple)) {
    throw std::logic_error("tuple of " + schema.name() + " does not belong to residual join " +
                           std::to_string(e.combination.index));
  }
  auto rel = plan.query.relation_index(schema.name());
  if (!rel) throw PlanMismatch("relation " + schema.name() + " is not part of the plan's query");
  Grid grid(plan, entry, hashes);
  std::vector<std::uint64_t> cells;
  grid.route(*rel, tuple, hashes, cells);
  std::vector<ReducerKey> out;
  out.reserve(cells.size());
  for (auto c : cells) out.push_back(grid.key(c, e.combination.index));
  return out;
}

ExecutionResult execute_plan(const Database& db, const JoinQuery& query, const Plan& plan,
                             const ExecutionOptions& options) {
  if (!(query == plan.query)) throw PlanMismatch("plan was built for " + plan.query.to_string());
  const auto decomposition = plan.decomposition();
  if (decomposition.size() != plan.entries.size()) throw PlanMismatch("plan entries do not cover every combination");
  const HashFamily hashes(options.seed);

  std::vector<Grid> grids;
  std::vector<long> grid_of(plan.entries.size(), -1);
  std::size_t total_cells = 0;
  for (std::size_t i = 0; i < plan.entries.size(); ++i) {
    const auto& e = plan.entries[i];
    if (e.spec.empty || e.reducers == 0) continue;
    Grid g(plan, i, hashes);
    if (g.cells > e.reducers) {
      throw PlanMismatch("residual join " + std::to_string(i) + " grid exceeds its " + std::to_string(e.reducers) +
                         " reducers");
    }
    g.offset = total_cells;
    total_cells += g.cells;
    grid_of[i] = static_cast<long>(grids.size());
    grids.push_back(std::move(g));
  }

  std::vector<Inbox> inboxes(total_cells, Inbox(query.relations().size()));
  std::vector<ReducerKey> keys;
  keys.reserve(total_cells);
  for (const auto& g : grids) {
    for (std::uint64_t c = 0; c < g.cells; ++c) keys.push_back(g.key(c, plan.entries[g.entry].combination.index));
  }

  std::vector<ResidualTrace> residuals;
  for (const auto& g : grids) {
    const auto& e = plan.entries[g.entry];
    ResidualTrace rt{e.combination.index, g.attributes, g.shares, {}, e.spec.relevant_sizes};
    for (const auto& r : query.relations()) rt.copies[r.name()] = 0;
    residuals.push_back(std::move(rt));
  }

  SizeMap copies;
  std::vector<std::uint64_t> cells;
  for (std::size_t rel = 0; rel < query.relations().size(); ++rel) {
    const auto& schema = query.relations()[rel];
    copies[schema.name()] = 0;
    for (const auto& t : db.at(schema.name()).tuples()) {
      for (auto combo : decomposition.matching_combinations(schema, t)) {
        auto gi = grid_of[combo];
        if (gi < 0) continue;
        const auto& g = grids[static_cast<std::size_t>(gi)];
        g.route(rel, t, hashes, cells);
        for (auto c : cells) {
          auto& inbox = inboxes[g.offset + c];
          inbox[rel].push_back(&t);
          check_cap(inbox, keys[g.offset + c], options);
        }
        residuals[static_cast<std::size_t>(gi)].copies[schema.name()] += cells.size();
        copies[schema.name()] += cells.size();
      }
    }
  }

  auto result = finish(query, std::move(keys), inboxes, options);
  result.trace.residuals = std::move(residuals);
  result.trace.copies_per_relation = std::move(copies);
  for (const auto& [rel, n] : result.trace.copies_per_relation) result.trace.communication_cost += n;
  return result;
}

ExecutionResult baseline_hh_execute(const RelationInstance& r, const RelationInstance& s, const Attribute& join_attribute,
                                    const std::vector<Value>& hh_values, std::uint64_t k,
                                    const ExecutionOptions& options) {
  if (k < 1) throw std::invalid_argument("baseline needs at least one reducer");
  JoinQuery query({r.schema(), s.schema()});
  if (query.join_attributes() != std::vector<Attribute>{join_attribute}) {
    throw std::invalid_argument("baseline strategy needs two relations sharing exactly the attribute " + join_attribute);
  }
  const HashFamily hashes(options.seed);
  const auto join_key = hashes.key(0, join_attribute);
  const std::array<const RelationInstance*, 2> sides{&r, &s};
  const std::array<std::size_t, 2> join_col{*r.schema().index_of(join_attribute), *s.schema().index_of(join_attribute)};

  std::unordered_map<Value, std::size_t> heavy;
  for (std::size_t i = 0; i < hh_values.size(); ++i) heavy.emplace(hh_values[i], i);

  // Per HH value: which side gets partitioned (the larger one; R on ties).
  std::vector<std::array<std::uint64_t, 2>> counts(hh_values.size(), {0, 0});
  for (std::size_t side = 0; side < 2; ++side) {
    for (const auto& t : sides[side]->tuples()) {
      auto it = heavy.find(t[join_col[side]]);
      if (it != heavy.end()) ++counts[it->second][side];
    }
  }

  const std::size_t groups = 1 + hh_values.size();
  std::vector<Inbox> inboxes(groups * k, Inbox(2));
  std::vector<ReducerKey> keys;
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::uint64_t b = 0; b < k; ++b) keys.push_back({g, {b}});
  }

  ExecutionResult partial;
  SizeMap copies{{r.name(), 0}, {s.name(), 0}};
  std::string rest;
  for (std::size_t side = 0; side < 2; ++side) {
    const auto& inst = *sides[side];
    for (const auto& t : inst.tuples()) {
      auto it = heavy.find(t[join_col[side]]);
      if (it == heavy.end()) {
        auto b = hashes.bucket(join_key, t[join_col[side]], k);
        inboxes[b][side].push_back(&t);
        check_cap(inboxes[b], keys[b], options);
        ++copies[inst.name()];
        continue;
      }
      const std::size_t group = 1 + it->second;
      const auto& c = counts[it->second];
      const std::size_t partitioned = c[0] >= c[1] ? 0 : 1;
      if (side == partitioned) {
        rest.clear();
        for (std::size_t col = 0; col < t.size(); ++col) {
          if (col != join_col[side]) append_key(rest, t[col]);
        }
        auto b = hashes.bucket(hashes.key(group, "partition"), rest, k);
        inboxes[group * k + b][side].push_back(&t);
        check_cap(inboxes[group * k + b], keys[group * k + b], options);
        ++copies[inst.name()];
      } else {
        for (std::uint64_t b = 0; b < k; ++b) {
          inboxes[group * k + b][side].push_back(&t);
          check_cap(inboxes[group * k + b], keys[group * k + b], options);
        }
        copies[inst.name()] += k;
      }
    }
  }

  auto result = finish(query, std::move(keys), inboxes, options);
  result.trace.copies_per_relation = std::move(copies);
  for (const auto& [rel, n] : result.trace.copies_per_relation) result.trace.communication_cost += n;
  return result;
}

Metrics measure(const ShuffleTrace& trace) {
  Metrics m;
  m.total_communication = trace.communication_cost;
  m.max_load = trace.max_load;
  m.reducers = trace.reducers.size();
  for (const auto& rt : trace.residuals) {
    std::map<std::string, double> rep;
    for (const auto& [rel, n] : rt.copies) {
      auto it = rt.relevant_sizes.find(rel);
      if (it != rt.relevant_sizes.end() && it->second > 0) {
        rep[rel] = static_cast<double>(n) / static_cast<double>(it->second);
      }
    }
    m.replication.push_back(std::move(rep));
  }
  if (!trace.reducers.empty()) {
    double sum = 0.0;
    for (const auto& r : trace.reducers) sum += static_cast<double>(r.received);
    m.mean_load = sum / static_cast<double>(trace.reducers.size());
    double var = 0.0;
    for (const auto& r : trace.reducers) {
      const double d = static_cast<double>(r.received) - m.mean_load;
      var += d * d;
    }
    m.stddev_load = std::sqrt(var / static_cast<double>(trace.reducers.size()));
  }
  return m;
}

std::uint64_t predicted_communication(const Plan& plan) {
  std::uint64_t total = 0;
  for (const auto& e : plan.entries) {
    if (e.spec.empty || e.reducers == 0) continue;
    total += evaluate_cost(e.expression, e.spec.relevant_sizes, e.integer.shares);
  }
  return total;
}

}  // namespace skewjoin
