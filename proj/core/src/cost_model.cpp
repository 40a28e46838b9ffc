#include "skewjoin/cost_model.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

namespace skewjoin {

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

CostExpression build(const JoinQuery& query, const std::set<Attribute>& sharing) {
  CostExpression e;
  e.share_attributes.assign(sharing.begin(), sharing.end());
  for (const auto& r : query.relations()) {
    CostTerm term{r.name(), {}};
    for (const auto& a : sharing) {
      if (!r.contains(a)) term.variables.push_back(a);
    }
    e.terms.push_back(std::move(term));
  }
  return e;
}

const std::uint64_t& size_of(const SizeMap& sizes, const std::string& relation) {
  auto it = sizes.find(relation);
  if (it == sizes.end()) throw std::out_of_range("no size for relation " + relation);
  return it->second;
}

}  // namespace

std::vector<Attribute> CostExpression::variables() const {
  std::set<Attribute> vars;
  for (const auto& t : terms) vars.insert(t.variables.begin(), t.variables.end());
  return {vars.begin(), vars.end()};
}

std::string CostExpression::to_string() const {
  std::string out;
  for (const auto& t : terms) {
    if (!out.empty()) out += " + ";
    out += lowercase(t.relation);
    for (const auto& v : t.variables) out += "*" + lowercase(v);
  }
  return out;
}

CostExpression base_cost_expression(const JoinQuery& query) {
  return build(query, {query.attributes().begin(), query.attributes().end()});
}

CostExpression residual_cost_expression(const JoinQuery& query, const TypeCombination& combination) {
  std::set<Attribute> eligible;
  for (const auto& a : query.attributes()) {
    if (combination.type_of(a).is_ordinary()) eligible.insert(a);
  }
  for (const auto& a : dominated_attributes(query, eligible)) eligible.erase(a);
  return build(query, eligible);
}

double evaluate_cost(const CostExpression& expression, const SizeMap& sizes, const ShareAssignment& shares) {
  double total = 0.0;
  for (const auto& t : expression.terms) {
    double term = static_cast<double>(size_of(sizes, t.relation));
    for (const auto& v : t.variables) term *= shares.get(v);
    total += term;
  }
  return total;
}

std::uint64_t evaluate_cost(const CostExpression& expression, const SizeMap& sizes, const IntegerShares& shares) {
  std::uint64_t total = 0;
  for (const auto& t : expression.terms) {
    std::uint64_t term = size_of(sizes, t.relation);
    for (const auto& v : t.variables) term *= shares.get(v);
    total += term;
  }
  return total;
}

double baseline_cost(std::uint64_t r, std::uint64_t s, std::uint64_t k) {
  if (k < 1) throw std::invalid_argument("baseline needs at least one reducer");
  if (r < s) throw std::invalid_argument("baseline expects the partitioned side to be the larger one (r >= s)");
  return static_cast<double>(r) + static_cast<double>(k) * static_cast<double>(s);
}

}  // namespace skewjoin
