#include "skewjoin/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace skewjoin {

using nlohmann::json;

InputError::InputError(const std::string& file, std::size_t line, const std::string& what)
    : std::runtime_error(file + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
      file_(file),
      line_(line) {}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string(), 0, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path.string(), 0, "cannot open file for writing");
  out << text;
  if (!out) throw InputError(path.string(), 0, "write failed");
}

JoinQuery read_query_file(const std::filesystem::path& path) {
  auto text = read_text_file(path);
  try {
    return parse_query(text);
  } catch (const QueryParseError& e) {
    std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(),
                                                                text.begin() + static_cast<long>(std::min(e.position(), text.size())), '\n'));
    throw InputError(path.string(), line, e.what());
  } catch (const QueryError& e) {
    throw InputError(path.string(), 0, e.what());
  }
}

namespace {

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    out.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

RelationInstance read_relation_tsv(const std::filesystem::path& path, const RelationSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string(), 0, "cannot open data file for relation " + schema.name());
  RelationInstance inst(schema);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header) {
      auto names = split_tabs(line);
      if (names != schema.attributes()) {
        throw InputError(path.string(), lineno, "header does not match the attributes of " + schema.name());
      }
      header = true;
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != schema.arity()) {
      throw InputError(path.string(), lineno,
                       "expected " + std::to_string(schema.arity()) + " fields, found " + std::to_string(fields.size()));
    }
    inst.add(std::move(fields));
  }
  if (!header) throw InputError(path.string(), 0, "missing header row");
  return inst;
}

void write_relation_tsv(const std::filesystem::path& path, const RelationInstance& instance) {
  std::ostringstream out;
  const auto& attrs = instance.schema().attributes();
  for (std::size_t i = 0; i < attrs.size(); ++i) out << (i ? "\t" : "") << attrs[i];
  out << '\n';
  for (const auto& t : instance.tuples()) {
    for (std::size_t i = 0; i < t.size(); ++i) out << (i ? "\t" : "") << t[i];
    out << '\n';
  }
  write_text_file(path, out.str());
}

Database load_database(const std::filesystem::path& dir, const JoinQuery& query) {
  Database db;
  for (const auto& r : query.relations()) {
    auto path = dir / (r.name() + ".tsv");
    if (!std::filesystem::exists(path)) throw InputError(path.string(), 0, "missing data for relation " + r.name());
    db.put(read_relation_tsv(path, r));
  }
  return db;
}

void save_database(const std::filesystem::path& dir, const Database& db) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, inst] : db.relations()) write_relation_tsv(dir / (name + ".tsv"), inst);
}

namespace {

json parse_document(std::string_view text, const char* what) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(what, 0, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format_version", 0) != kFormatVersion) {
    throw InputError(what, 0, "expected a JSON object with format_version 1");
  }
  return doc;
}

json sizes_json(const SizeMap& sizes) {
  json out = json::object();
  for (const auto& [k, v] : sizes) out[k] = v;
  return out;
}

SizeMap sizes_from(const json& j) {
  SizeMap out;
  for (const auto& [k, v] : j.items()) out[k] = v.get<std::uint64_t>();
  return out;
}

json heavy_values_json(const TypeSets& sets) {
  json out = json::object();
  for (std::size_t i = 0; i < sets.attributes.size(); ++i) {
    if (sets.types[i].size() <= 1) continue;
    json values = json::array();
    for (std::size_t j = 1; j < sets.types[i].size(); ++j) values.push_back(sets.types[i][j].value());
    out[sets.attributes[i]] = values;
  }
  return out;
}

TypeSets type_sets_from(const json& j, const JoinQuery& query) {
  for (const auto& [attr, _] : j.items()) {
    if (!query.has_attribute(attr)) throw InputError("plan", 0, "heavy hitters listed for unknown attribute " + attr);
  }
  TypeSets sets;
  for (const auto& attr : query.attributes()) {
    std::vector<AttrType> types{AttrType::ordinary()};
    if (j.contains(attr)) {
      for (const auto& v : j.at(attr)) types.push_back(AttrType::heavy(v.get<std::string>()));
    }
    sets.attributes.push_back(attr);
    sets.types.push_back(std::move(types));
  }
  return sets;
}

template <typename T>
json shares_json(const Shares<T>& shares) {
  json out = json::object();
  for (const auto& [k, v] : shares.values()) out[k] = v;
  return out;
}

template <typename T>
Shares<T> shares_from(const json& j) {
  Shares<T> out;
  for (const auto& [k, v] : j.items()) out.set(k, v.template get<T>());
  return out;
}

}  // namespace

std::string hh_report_to_json(const HeavyHitterReport& report) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["threshold_fraction"] = report.threshold_fraction;
  doc["relation_sizes"] = sizes_json(report.relation_sizes);
  json attrs = json::array();
  for (const auto& a : report.attributes) {
    json values = json::array();
    for (const auto& hh : a.values) values.push_back({{"value", hh.value}, {"counts", sizes_json(hh.counts)}});
    attrs.push_back({{"attribute", a.attribute}, {"values", values}});
  }
  doc["heavy_hitters"] = attrs;
  return doc.dump(2) + "\n";
}

HeavyHitterReport hh_report_from_json(std::string_view text) {
  auto doc = parse_document(text, "heavy-hitter report");
  try {
    HeavyHitterReport report;
    report.threshold_fraction = doc.at("threshold_fraction").get<double>();
    report.relation_sizes = sizes_from(doc.at("relation_sizes"));
    for (const auto& a : doc.at("heavy_hitters")) {
      AttributeHeavyHitters entry{a.at("attribute").get<std::string>(), {}};
      for (const auto& v : a.at("values")) {
        entry.values.push_back({v.at("value").get<std::string>(), sizes_from(v.at("counts"))});
      }
      report.attributes.push_back(std::move(entry));
    }
    return report;
  } catch (const json::exception& e) {
    throw InputError("heavy-hitter report", 0, e.what());
  }
}

std::string plan_to_json(const Plan& plan) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["query"] = plan.query.to_string();
  doc["total_reducers"] = plan.total_reducers;
  doc["optimizer"] = {{"tolerance", plan.config.tolerance},
                      {"max_iterations", plan.config.max_iterations},
                      {"integerization", to_string(plan.config.integerization)},
                      {"exhaustive_node_cap", plan.config.exhaustive_node_cap}};
  doc["heavy_hitters"] = heavy_values_json(plan.type_sets);
  json entries = json::array();
  for (const auto& e : plan.entries) {
    json types = json::object();
    for (std::size_t i = 0; i < e.combination.attributes.size(); ++i) {
      types[e.combination.attributes[i]] = e.combination.types[i].label();
    }
    entries.push_back({
        {"combination", e.combination.index},
        {"types", types},
        {"relevant_sizes", sizes_json(e.spec.relevant_sizes)},
        {"empty", e.spec.empty},
        {"cost_expression", e.expression.to_string()},
        {"share_attributes", e.expression.share_attributes},
        {"reducers", e.reducers},
        {"continuous_shares", shares_json(e.continuous.shares)},
        {"integer_shares", shares_json(e.integer.shares)},
        {"predicted_continuous_cost", e.continuous.cost},
        {"predicted_integer_cost", e.integer.cost},
        {"integer_search_exhaustive", e.integer.exhaustive},
        {"diagnostics",
         {{"iterations", e.continuous.iterations},
          {"kkt_residual", e.continuous.kkt_residual},
          {"multiplier", e.continuous.multiplier},
          {"clamped", e.continuous.clamped},
          {"converged", e.continuous.converged}}},
    });
  }
  doc["entries"] = entries;
  doc["totals"] = {{"max_expected_load", plan.max_expected_load},
                   {"continuous_cost", plan.total_continuous_cost},
                   {"integer_cost", plan.total_integer_cost}};
  return doc.dump(2) + "\n";
}

Plan plan_from_json(std::string_view text) {
  auto doc = parse_document(text, "plan");
  try {
    auto query = parse_query(doc.at("query").get<std::string>());
    OptimizerConfig config;
    const auto& opt = doc.at("optimizer");
    config.tolerance = opt.at("tolerance").get<double>();
    config.max_iterations = opt.at("max_iterations").get<std::size_t>();
    config.integerization = integerization_mode_from_string(opt.at("integerization").get<std::string>());
    config.exhaustive_node_cap = opt.at("exhaustive_node_cap").get<std::size_t>();

    Decomposition decomposition(query, type_sets_from(doc.at("heavy_hitters"), query));
    const auto& totals = doc.at("totals");
    Plan plan{query,
              decomposition.type_sets(),
              doc.at("total_reducers").get<std::uint64_t>(),
              config,
              {},
              totals.at("max_expected_load").get<double>(),
              totals.at("continuous_cost").get<double>(),
              totals.at("integer_cost").get<std::uint64_t>()};

    const auto& entries = doc.at("entries");
    if (entries.size() != decomposition.size()) {
      throw InputError("plan", 0, "plan lists " + std::to_string(entries.size()) + " entries for " +
                                      std::to_string(decomposition.size()) + " combinations");
    }
    for (const auto& j : entries) {
      auto index = j.at("combination").get<std::size_t>();
      if (index >= decomposition.size()) throw InputError("plan", 0, "combination index out of range");
      const auto& combination = decomposition.combinations()[index];
      for (const auto& [attr, label] : j.at("types").items()) {
        if (combination.type_of(attr).label() != label.get<std::string>()) {
          throw InputError("plan", 0, "combination " + std::to_string(index) + " disagrees on the type of " + attr);
        }
      }
      PlanEntry e;
      e.combination = combination;
      e.spec = {index, sizes_from(j.at("relevant_sizes")), j.at("empty").get<bool>()};
      e.expression = residual_cost_expression(query, combination);
      if (e.expression.to_string() != j.at("cost_expression").get<std::string>()) {
        throw InputError("plan", 0, "cost expression of combination " + std::to_string(index) + " does not match the query");
      }
      e.reducers = j.at("reducers").get<std::uint64_t>();
      e.continuous.shares = shares_from<double>(j.at("continuous_shares"));
      e.continuous.cost = j.at("predicted_continuous_cost").get<double>();
      const auto& diag = j.at("diagnostics");
      e.continuous.iterations = diag.at("iterations").get<std::size_t>();
      e.continuous.kkt_residual = diag.at("kkt_residual").get<double>();
      e.continuous.multiplier = diag.at("multiplier").get<double>();
      e.continuous.clamped = diag.at("clamped").get<std::vector<Attribute>>();
      e.continuous.converged = diag.at("converged").get<bool>();
      e.integer.shares = shares_from<std::uint64_t>(j.at("integer_shares"));
      e.integer.cost = j.at("predicted_integer_cost").get<std::uint64_t>();
      e.integer.exhaustive = j.at("integer_search_exhaustive").get<bool>();
      plan.entries.push_back(std::move(e));
    }
    return plan;
  } catch (const json::exception& e) {
    throw InputError("plan", 0, e.what());
  } catch (const QueryError& e) {
    throw InputError("plan", 0, e.what());
  }
}

PlanningStats planning_stats_from_json(std::string_view text, const JoinQuery& query) {
  auto doc = parse_document(text, "stats");
  try {
    PlanningStats stats{type_sets_from(doc.value("heavy_hitters", json::object()), query), {}};
    Decomposition decomposition(query, stats.type_sets);
    stats.specs.resize(decomposition.size());
    std::vector<bool> seen(decomposition.size(), false);
    for (const auto& j : doc.at("combinations")) {
      auto index = j.at("combination").get<std::size_t>();
      if (index >= decomposition.size() || seen[index]) {
        throw InputError("stats", 0, "invalid or repeated combination index " + std::to_string(index));
      }
      seen[index] = true;
      ResidualSpec spec{index, sizes_from(j.at("relevant_sizes")), false};
      for (const auto& r : query.relations()) {
        auto it = spec.relevant_sizes.find(r.name());
        if (it == spec.relevant_sizes.end()) {
          throw InputError("stats", 0, "combination " + std::to_string(index) + " lacks a size for " + r.name());
        }
        if (it->second == 0) spec.empty = true;
      }
      stats.specs[index] = std::move(spec);
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
      if (!seen[i]) throw InputError("stats", 0, "missing relevant sizes for combination " + std::to_string(i));
    }
    return stats;
  } catch (const json::exception& e) {
    throw InputError("stats", 0, e.what());
  }
}

std::string planning_stats_to_json(const Decomposition& decomposition, const std::vector<ResidualSpec>& specs) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["heavy_hitters"] = heavy_values_json(decomposition.type_sets());
  json combos = json::array();
  for (const auto& s : specs) combos.push_back({{"combination", s.combination}, {"relevant_sizes", sizes_json(s.relevant_sizes)}});
  doc["combinations"] = combos;
  return doc.dump(2) + "\n";
}

}  // namespace skewjoin
