#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "skewjoin/datagen.hpp"
#include "skewjoin/decomposer.hpp"
#include "skewjoin/hh_detector.hpp"
#include "skewjoin/io.hpp"
#include "skewjoin/oracle.hpp"
#include "skewjoin/plan.hpp"
#include "skewjoin/simulator.hpp"

namespace skewjoin::cli {

namespace {

using nlohmann::json;

struct Options {
  std::string query;
  std::string data;
  std::string out;
  std::string hh;
  std::string stats;
  std::string plan;
  std::string results;
  std::string integerization = "exhaustive";
  std::uint64_t k = 0;
  std::optional<double> tau;
  std::uint64_t seed = 0;
  bool verify = false;
  bool single_thread = false;
  std::uint64_t n = 1000;
  double zipf = 0.0;
  std::uint64_t universe = 0;
  std::vector<std::string> plant;
  std::size_t combination = 0;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
  } else {
    write_text_file(o.out, text);
  }
}

HeavyHitterReport heavy_hitters_for(const Options& o, const Database& db, const JoinQuery& q) {
  if (!o.hh.empty()) return hh_report_from_json(read_text_file(o.hh));
  if (!o.tau) throw UsageError("--tau or --hh is required");
  return detect_heavy_hitters(db, q, *o.tau);
}

ExecutionOptions execution_options(const Options& o, bool compute_join) {
  ExecutionOptions ex;
  ex.seed = o.seed;
  ex.single_thread = o.single_thread;
  ex.compute_join = compute_join;
  return ex;
}

json loads_json(const Metrics& m) {
  return {{"max", m.max_load}, {"mean", m.mean_load}, {"stddev", m.stddev_load}, {"reducers", m.reducers}};
}

int cmd_detect(const Options& o, std::ostream& out) {
  auto q = read_query_file(o.query);
  auto db = load_database(o.data, q);
  if (!o.tau) throw UsageError("--tau is required");
  emit(o, hh_report_to_json(detect_heavy_hitters(db, q, *o.tau)), out);
  return kOk;
}

int cmd_plan(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.k == 0) throw UsageError("-k must be at least 1");
  auto q = read_query_file(o.query);
  OptimizerConfig config;
  config.integerization = integerization_mode_from_string(o.integerization);

  Plan plan = [&] {
    if (!o.stats.empty()) {
      auto stats = planning_stats_from_json(read_text_file(o.stats), q);
      Decomposition d(q, stats.type_sets);
      return make_plan(d, stats.specs, o.k, config);
    }
    if (o.data.empty()) throw UsageError("plan needs --data or --stats");
    auto db = load_database(o.data, q);
    return make_plan(db, q, heavy_hitters_for(o, db, q), o.k, config);
  }();
  emit(o, plan_to_json(plan), out);

  for (const auto& e : plan.entries) {
    if (!e.spec.empty && !e.continuous.converged) {
      err << "optimizer did not converge for combination " << e.combination.index << "\n";
      return kNonConvergence;
    }
  }
  return kOk;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.plan.empty()) throw UsageError("--plan is required");
  auto q = read_query_file(o.query);
  auto db = load_database(o.data, q);
  auto plan = plan_from_json(read_text_file(o.plan));
  if (!(plan.query == q)) throw PlanMismatch("plan was made for query " + plan.query.to_string());

  auto result = execute_plan(db, q, plan, execution_options(o, true));
  const auto predicted = predicted_communication(plan);
  auto m = measure(result.trace);

  json doc;
  doc["format_version"] = kFormatVersion;
  doc["query"] = q.to_string();
  doc["seed"] = o.seed;
  doc["measured_communication"] = result.trace.communication_cost;
  doc["predicted_communication"] = predicted;
  doc["cost_match"] = result.trace.communication_cost == predicted;
  doc["copies_per_relation"] = result.trace.copies_per_relation;
  doc["output_size"] = result.output.size();
  doc["emitted_rows"] = result.emitted_rows;
  doc["loads"] = loads_json(m);
  json residuals = json::array();
  for (std::size_t i = 0; i < result.trace.residuals.size(); ++i) {
    const auto& r = result.trace.residuals[i];
    residuals.push_back({{"combination", r.combination},
                         {"grid_attributes", r.grid_attributes},
                         {"grid_shares", r.grid_shares},
                         {"copies", r.copies},
                         {"relevant_sizes", r.relevant_sizes},
                         {"replication", m.replication[i]}});
  }
  doc["residuals"] = residuals;
  json reducers = json::array();
  for (const auto& r : result.trace.reducers) {
    reducers.push_back({{"reducer", r.key.to_string()}, {"received", r.received}, {"output", r.output}});
  }
  doc["reducers"] = reducers;

  bool ok = doc["cost_match"].get<bool>();
  if (o.verify) {
    bool match = result.output == oracle::nested_loop_join(db, q);
    doc["oracle_check"] = match;
    ok = ok && match;
  }
  emit(o, doc.dump(2) + "\n", out);

  if (!o.results.empty()) {
    std::ostringstream rows;
    for (std::size_t i = 0; i < q.attributes().size(); ++i) rows << (i ? "\t" : "") << q.attributes()[i];
    rows << '\n';
    for (const auto& row : result.output) {
      for (std::size_t i = 0; i < row.size(); ++i) rows << (i ? "\t" : "") << row[i];
      rows << '\n';
    }
    write_text_file(o.results, rows.str());
  }
  if (!ok) {
    err << "verification failed\n";
    return kVerificationFailure;
  }
  return kOk;
}

// Two relations sharing exactly one attribute; the baseline is undefined otherwise.
std::optional<Attribute> two_way_join_attribute(const JoinQuery& q) {
  if (q.relations().size() != 2) return std::nullopt;
  auto joins = q.join_attributes();
  if (joins.size() != 1) return std::nullopt;
  return joins.front();
}

int cmd_compare(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.k == 0) throw UsageError("-k must be at least 1");
  auto q = read_query_file(o.query);
  auto db = load_database(o.data, q);
  auto report = heavy_hitters_for(o, db, q);
  const auto ex = execution_options(o, o.verify);
  std::set<ResultTuple> expected;
  if (o.verify) expected = oracle::nested_loop_join(db, q);

  bool ok = true;
  auto summarize = [&](const ExecutionResult& r, std::optional<std::uint64_t> predicted) {
    auto m = measure(r.trace);
    json s = {{"communication_cost", r.trace.communication_cost}, {"max_load", m.max_load}, {"loads", loads_json(m)}};
    if (predicted) s["predicted_communication"] = *predicted;
    if (o.verify) {
      bool match = r.output == expected;
      s["oracle_check"] = match;
      ok = ok && match;
    }
    return s;
  };

  json doc;
  doc["format_version"] = kFormatVersion;
  doc["query"] = q.to_string();
  doc["k"] = o.k;
  doc["tau"] = report.threshold_fraction;
  doc["seed"] = o.seed;
  doc["heavy_hitters"] = json::object();
  for (const auto& a : report.attributes) {
    if (a.values.empty()) continue;
    json values = json::array();
    for (const auto& v : a.values) values.push_back(v.value);
    doc["heavy_hitters"][a.attribute] = values;
  }

  if (auto join = two_way_join_attribute(q)) {
    const auto& r = db.at(q.relations()[0].name());
    const auto& s = db.at(q.relations()[1].name());
    auto result = baseline_hh_execute(r, s, *join, report.values_of(*join), o.k, ex);
    doc["baseline"] = summarize(result, std::nullopt);
  } else {
    doc["baseline"] = nullptr;
  }

  auto shares = make_shares_plan(db, q, o.k);
  doc["plain_shares"] = summarize(execute_plan(db, q, shares, ex), predicted_communication(shares));

  Decomposition d(q, report);
  auto specs = residual_specs(db, d);
  const auto nonempty =
      static_cast<std::uint64_t>(std::count_if(specs.begin(), specs.end(), [](const auto& s) { return !s.empty; }));
  const auto budget = std::max(o.k, nonempty);
  auto aware = make_plan(d, specs, budget);
  auto aware_summary = summarize(execute_plan(db, q, aware, ex), predicted_communication(aware));
  aware_summary["reducer_budget"] = budget;
  doc["hh_aware"] = aware_summary;

  emit(o, doc.dump(2) + "\n", out);
  if (!ok) {
    err << "verification failed\n";
    return kVerificationFailure;
  }
  return kOk;
}

std::vector<PlantedValue> parse_planted(const std::vector<std::string>& specs) {
  std::vector<PlantedValue> out;
  for (const auto& spec : specs) {
    auto eq = spec.find('=');
    auto colon = spec.rfind(':');
    if (eq == std::string::npos || colon == std::string::npos || colon < eq) {
      throw UsageError("--plant expects ATTR=VALUE:FRACTION, got " + spec);
    }
    PlantedValue p{spec.substr(0, eq), spec.substr(eq + 1, colon - eq - 1), 0.0};
    try {
      p.fraction = std::stod(spec.substr(colon + 1));
    } catch (const std::exception&) {
      throw UsageError("bad fraction in --plant " + spec);
    }
    out.push_back(std::move(p));
  }
  return out;
}

int cmd_gen(const Options& o) {
  if (o.out.empty()) throw UsageError("gen needs --out DIR");
  auto q = read_query_file(o.query);
  auto db = generate_database(q, o.n, o.zipf, parse_planted(o.plant), o.seed, o.universe);
  save_database(o.out, db);
  return kOk;
}

int cmd_materialize(const Options& o, std::ostream& err) {
  if (o.out.empty()) throw UsageError("materialize needs --out DIR");
  auto q = read_query_file(o.query);
  auto db = load_database(o.data, q);
  Decomposition d(q, heavy_hitters_for(o, db, q));
  if (o.combination >= d.size()) throw UsageError("combination index out of range");
  auto m = oracle::materialize_hh_free(db, q, d.type_sets(), d.combinations()[o.combination]);
  save_database(o.out, m.db);
  write_text_file(std::filesystem::path(o.out) / "query.txt", m.query.to_string() + "\n");

  auto expected = oracle::residual_join(db, q, d.type_sets(), d.combinations()[o.combination]);
  if (m.map_back(oracle::nested_loop_join(m.db, m.query)) != expected) {
    err << "round trip through the materialized database does not reproduce the residual join\n";
    return kVerificationFailure;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Skew-aware multiway join planner and shuffle simulator", "skewjoin"};
  app.require_subcommand(1);
  Options o;

  auto add_query = [&](CLI::App* c) { c->add_option("--query", o.query, "Query file")->required(); };
  auto add_data = [&](CLI::App* c, bool required) {
    auto* opt = c->add_option("--data", o.data, "Directory of <Relation>.tsv files");
    if (required) opt->required();
  };
  auto add_common = [&](CLI::App* c) {
    c->add_option("--out", o.out, "Output file (directory for gen/materialize)");
    c->add_option("--seed", o.seed, "Seed for hashing and data generation");
  };

  auto* detect = app.add_subcommand("detect", "Find heavy hitters");
  add_query(detect);
  add_data(detect, true);
  detect->add_option("--tau", o.tau, "Threshold fraction in (0,1]");
  add_common(detect);

  auto* plan = app.add_subcommand("plan", "Compute a skew-aware plan");
  add_query(plan);
  add_data(plan, false);
  plan->add_option("-k", o.k, "Total reducer budget")->required();
  plan->add_option("--tau", o.tau, "Threshold fraction in (0,1]");
  plan->add_option("--hh", o.hh, "Heavy-hitter report from detect");
  plan->add_option("--stats", o.stats, "Relevant sizes per combination (plans without data)");
  plan->add_option("--integerization", o.integerization, "exhaustive or greedy")
      ->check(CLI::IsMember({"exhaustive", "greedy"}));
  add_common(plan);

  auto* simulate = app.add_subcommand("simulate", "Execute a plan on data");
  add_query(simulate);
  add_data(simulate, true);
  simulate->add_option("--plan", o.plan, "Plan file")->required();
  simulate->add_option("--results", o.results, "Write the join result as TSV");
  simulate->add_flag("--verify", o.verify, "Check the output against a nested-loop join");
  simulate->add_flag("--single-thread", o.single_thread, "Run reducers sequentially");
  add_common(simulate);

  auto* compare = app.add_subcommand("compare", "Baseline vs plain Shares vs skew-aware plan");
  add_query(compare);
  add_data(compare, true);
  compare->add_option("-k", o.k, "Total reducer budget")->required();
  compare->add_option("--tau", o.tau, "Threshold fraction in (0,1]");
  compare->add_option("--hh", o.hh, "Heavy-hitter report from detect");
  compare->add_flag("--verify", o.verify, "Run the joins and check them against a nested-loop join");
  compare->add_flag("--single-thread", o.single_thread, "Run reducers sequentially");
  add_common(compare);

  auto* gen = app.add_subcommand("gen", "Generate skewed TSV data");
  add_query(gen);
  gen->add_option("-n", o.n, "Tuples per relation");
  gen->add_option("--zipf", o.zipf, "Zipf exponent for join attributes (0 = uniform)");
  gen->add_option("--universe", o.universe, "Distinct values per attribute (0 = 10n)");
  gen->add_option("--plant", o.plant, "Planted heavy value ATTR=VALUE:FRACTION (repeatable)");
  add_common(gen);

  auto* materialize = app.add_subcommand("materialize", "");
  materialize->group("");
  add_query(materialize);
  add_data(materialize, true);
  materialize->add_option("--tau", o.tau);
  materialize->add_option("--hh", o.hh);
  materialize->add_option("--combination", o.combination)->required();
  add_common(materialize);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (*detect) return cmd_detect(o, out);
    if (*plan) return cmd_plan(o, out, err);
    if (*simulate) return cmd_simulate(o, out, err);
    if (*compare) return cmd_compare(o, out, err);
    if (*gen) return cmd_gen(o);
    if (*materialize) return cmd_materialize(o, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace skewjoin::cli
