#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skewjoin/decomposer.hpp"
#include "skewjoin/hh_detector.hpp"
#include "skewjoin/plan.hpp"
#include "skewjoin/query.hpp"
#include "skewjoin/relation.hpp"

namespace skewjoin {

inline constexpr int kFormatVersion = 1;

/// Malformed or unreadable input; the message names the file and, when
/// known, the 1-based line.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& file, std::size_t line, const std::string& what);
  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

JoinQuery read_query_file(const std::filesystem::path& path);

/// `<dir>/<Relation>.tsv`: header row of attribute names in schema order,
/// then one tab-separated tuple per line.
RelationInstance read_relation_tsv(const std::filesystem::path& path, const RelationSchema& schema);
void write_relation_tsv(const std::filesystem::path& path, const RelationInstance& instance);

/// Loads every relation of `query` from `dir`; a missing file is an
/// InputError naming the relation.
Database load_database(const std::filesystem::path& dir, const JoinQuery& query);
void save_database(const std::filesystem::path& dir, const Database& db);

std::string hh_report_to_json(const HeavyHitterReport& report);
HeavyHitterReport hh_report_from_json(std::string_view text);

std::string plan_to_json(const Plan& plan);
/// Inverse of plan_to_json; rejects documents whose expressions or
/// combinations disagree with the embedded query.
Plan plan_from_json(std::string_view text);

/// Catalog statistics for planning without data: the HH values per
/// attribute and the relevant sizes of every combination.
struct PlanningStats {
  TypeSets type_sets;
  std::vector<ResidualSpec> specs;
};

/// {"format_version":1, "heavy_hitters": {"B": ["b1", ...]},
///  "combinations": [{"combination": 0, "relevant_sizes": {"R": 10, ...}}, ...]}
PlanningStats planning_stats_from_json(std::string_view text, const JoinQuery& query);
std::string planning_stats_to_json(const Decomposition& decomposition, const std::vector<ResidualSpec>& specs);

}  // namespace skewjoin
