#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace skewjoin {

/// Attribute identity is by (case-sensitive) name.
using Attribute = std::string;

class QueryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by parse_query; `position()` is the byte offset into the source text.
class QueryParseError : public QueryError {
 public:
  QueryParseError(const std::string& what, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class RelationSchema {
 public:
  RelationSchema(std::string name, std::vector<Attribute> attributes);

  const std::string& name() const { return name_; }
  const std::vector<Attribute>& attributes() const { return attributes_; }
  std::size_t arity() const { return attributes_.size(); }

  bool contains(std::string_view attribute) const;
  /// Position of `attribute` in the schema, or nullopt.
  std::optional<std::size_t> index_of(std::string_view attribute) const;

  bool operator==(const RelationSchema&) const = default;

 private:
  std::string name_;
  std::vector<Attribute> attributes_;
};

/// A natural join over named relations. Attributes are ordered by first
/// appearance across the relations, which fixes every derived ordering.
class JoinQuery {
 public:
  explicit JoinQuery(std::vector<RelationSchema> relations);

  const std::vector<RelationSchema>& relations() const { return relations_; }
  const std::vector<Attribute>& attributes() const { return attributes_; }

  const RelationSchema& relation(std::string_view name) const;
  std::optional<std::size_t> relation_index(std::string_view name) const;
  std::optional<std::size_t> attribute_index(std::string_view attribute) const;
  bool has_attribute(std::string_view attribute) const { return attribute_index(attribute).has_value(); }

  /// Attributes that appear in at least two relations.
  std::vector<Attribute> join_attributes() const;

  /// Canonical text form `R(A,B); S(B,C)`; parse_query(to_string()) == *this.
  std::string to_string() const;

  bool operator==(const JoinQuery&) const = default;

 private:
  std::vector<RelationSchema> relations_;
  std::vector<Attribute> attributes_;
};

/// Parses `Name(A1,...,Am)` atoms separated by `;` or newlines. `#` starts a
/// comment running to end of line.
JoinQuery parse_query(std::string_view text);

/// Names of the relations whose schema lists `attribute`. Throws QueryError
/// for an unknown attribute.
std::set<std::string> relations_containing(const JoinQuery& query, std::string_view attribute);

/// Attributes of `eligible` that lose their share to another eligible
/// attribute appearing in a superset of relations. Among attributes with
/// identical relation sets the lexicographically smallest survives.
std::set<Attribute> dominated_attributes(const JoinQuery& query, const std::set<Attribute>& eligible);

}  // namespace skewjoin
