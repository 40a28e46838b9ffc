#include "skewjoin/query.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace skewjoin {

QueryParseError::QueryParseError(const std::string& what, std::size_t position)
    : QueryError(what + " at offset " + std::to_string(position)), position_(position) {}

RelationSchema::RelationSchema(std::string name, std::vector<Attribute> attributes)
    : name_(std::move(name)), attributes_(std::move(attributes)) {
  if (name_.empty()) throw QueryError("relation name must be nonempty");
  if (attributes_.empty()) throw QueryError("relation " + name_ + " has no attributes");
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].empty()) throw QueryError("empty attribute name in relation " + name_);
    for (std::size_t j = 0; j < i; ++j) {
      if (attributes_[i] == attributes_[j]) {
        throw QueryError("duplicate attribute " + attributes_[i] + " in relation " + name_);
      }
    }
  }
}

bool RelationSchema::contains(std::string_view attribute) const { return index_of(attribute).has_value(); }

std::optional<std::size_t> RelationSchema::index_of(std::string_view attribute) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i] == attribute) return i;
  }
  return std::nullopt;
}

JoinQuery::JoinQuery(std::vector<RelationSchema> relations) : relations_(std::move(relations)) {
  if (relations_.size() < 2) throw QueryError("a join needs at least 2 relations");
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (relations_[i].name() == relations_[j].name()) {
        throw QueryError("duplicate relation name " + relations_[i].name());
      }
    }
    for (const auto& a : relations_[i].attributes()) {
      if (std::find(attributes_.begin(), attributes_.end(), a) == attributes_.end()) attributes_.push_back(a);
    }
  }
}

const RelationSchema& JoinQuery::relation(std::string_view name) const {
  auto idx = relation_index(name);
  if (!idx) throw QueryError("unknown relation " + std::string(name));
  return relations_[*idx];
}

std::optional<std::size_t> JoinQuery::relation_index(std::string_view name) const {
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    if (relations_[i].name() == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> JoinQuery::attribute_index(std::string_view attribute) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i] == attribute) return i;
  }
  return std::nullopt;
}

std::vector<Attribute> JoinQuery::join_attributes() const {
  std::vector<Attribute> out;
  for (const auto& a : attributes_) {
    auto n = std::count_if(relations_.begin(), relations_.end(), [&](const auto& r) { return r.contains(a); });
    if (n >= 2) out.push_back(a);
  }
  return out;
}

std::string JoinQuery::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    if (i) out += "; ";
    out += relations_[i].name() + "(";
    const auto& attrs = relations_[i].attributes();
    for (std::size_t j = 0; j < attrs.size(); ++j) {
      if (j) out += ",";
      out += attrs[j];
    }
    out += ")";
  }
  return out;
}

namespace {

class QueryParser {
 public:
  explicit QueryParser(std::string_view text) : text_(text) {}

  JoinQuery parse() {
    std::vector<RelationSchema> relations;
    std::map<std::string, std::size_t> seen;
    skip_separators();
    while (pos_ < text_.size()) {
      std::size_t atom_start = pos_;
      auto [name, attributes] = parse_atom();
      if (seen.count(name)) throw QueryParseError("duplicate relation name " + name, atom_start);
      seen.emplace(name, atom_start);
      relations.emplace_back(std::move(name), std::move(attributes));
      skip_blanks();
      if (pos_ < text_.size() && text_[pos_] != ';' && text_[pos_] != '\n' && text_[pos_] != '#') {
        throw QueryParseError("expected ';' or newline between atoms", pos_);
      }
      skip_separators();
    }
    if (relations.size() < 2) throw QueryParseError("a join needs at least 2 relations", pos_);
    return JoinQuery(std::move(relations));
  }

 private:
  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  void skip_comment() {
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
  }

  // Spaces and tabs only; newlines are separators.
  void skip_blanks() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == '#') {
        skip_comment();
      } else {
        break;
      }
    }
  }

  void skip_separators() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';' || std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        skip_comment();
      } else {
        break;
      }
    }
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string identifier(const char* what) {
    if (pos_ >= text_.size() || !ident_start(text_[pos_])) {
      throw QueryParseError(std::string("expected ") + what, pos_);
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) throw QueryParseError(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  std::pair<std::string, std::vector<Attribute>> parse_atom() {
    std::string name = identifier("relation name");
    expect('(');
    std::vector<Attribute> attributes;
    while (true) {
      skip_ws();
      std::size_t at = pos_;
      std::string attr = identifier("attribute name");
      if (std::find(attributes.begin(), attributes.end(), attr) != attributes.end()) {
        throw QueryParseError("duplicate attribute " + attr + " in atom " + name, at);
      }
      attributes.push_back(std::move(attr));
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      expect(')');
      break;
    }
    return {std::move(name), std::move(attributes)};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

JoinQuery parse_query(std::string_view text) { return QueryParser(text).parse(); }

std::set<std::string> relations_containing(const JoinQuery& query, std::string_view attribute) {
  if (!query.has_attribute(attribute)) throw QueryError("unknown attribute " + std::string(attribute));
  std::set<std::string> out;
  for (const auto& r : query.relations()) {
    if (r.contains(attribute)) out.insert(r.name());
  }
  return out;
}

std::set<Attribute> dominated_attributes(const JoinQuery& query, const std::set<Attribute>& eligible) {
  std::map<Attribute, std::set<std::string>> rels;
  for (const auto& a : eligible) rels.emplace(a, relations_containing(query, a));

  std::set<Attribute> dominated;
  for (const auto& [a, ra] : rels) {
    for (const auto& [b, rb] : rels) {
      if (a == b) continue;
      if (!std::includes(rb.begin(), rb.end(), ra.begin(), ra.end())) continue;
      // Strict superset dominates; an equal set dominates only from a smaller name.
      if (rb.size() > ra.size() || b < a) {
        dominated.insert(a);
        break;
      }
    }
  }
  return dominated;
}

}  // namespace skewjoin
