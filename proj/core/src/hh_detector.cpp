#include "skewjoin/hh_detector.hpp"

#include <set>
#include <stdexcept>

namespace skewjoin {

std::vector<Value> HeavyHitterReport::values_of(std::string_view attribute) const {
  std::vector<Value> out;
  for (const auto& a : attributes) {
    if (a.attribute != attribute) continue;
    for (const auto& hh : a.values) out.push_back(hh.value);
  }
  return out;
}

std::size_t HeavyHitterReport::total_heavy_hitters() const {
  std::size_t n = 0;
  for (const auto& a : attributes) n += a.values.size();
  return n;
}

FrequencyMap count_frequencies(const RelationInstance& instance, std::string_view attribute) {
  auto idx = instance.schema().index_of(attribute);
  if (!idx) {
    throw std::invalid_argument("attribute " + std::string(attribute) + " is not in relation " + instance.name());
  }
  FrequencyMap counts;
  for (const auto& t : instance.tuples()) ++counts[t[*idx]];
  return counts;
}

HeavyHitterReport detect_heavy_hitters(const Database& db, const JoinQuery& query, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("heavy-hitter threshold must lie in (0, 1], got " + std::to_string(threshold));
  }
  HeavyHitterReport report;
  report.threshold_fraction = threshold;
  for (const auto& r : query.relations()) report.relation_sizes[r.name()] = db.at(r.name()).size();

  for (const auto& attr : query.join_attributes()) {
    std::vector<const RelationInstance*> holders;
    std::vector<FrequencyMap> freqs;
    for (const auto& r : query.relations()) {
      if (!r.contains(attr)) continue;
      holders.push_back(&db.at(r.name()));
      freqs.push_back(count_frequencies(*holders.back(), attr));
    }

    std::set<Value> heavy;
    for (std::size_t i = 0; i < holders.size(); ++i) {
      const double bar = threshold * static_cast<double>(holders[i]->size());
      for (const auto& [v, c] : freqs[i]) {
        if (static_cast<double>(c) >= bar) heavy.insert(v);
      }
    }

    AttributeHeavyHitters entry{attr, {}};
    std::set<Value> placed;
    for (std::size_t i = 0; i < holders.size() && placed.size() < heavy.size(); ++i) {
      auto col = *holders[i]->schema().index_of(attr);
      for (const auto& t : holders[i]->tuples()) {
        const auto& v = t[col];
        if (!heavy.count(v) || !placed.insert(v).second) continue;
        HeavyHitter hh{v, {}};
        for (std::size_t j = 0; j < holders.size(); ++j) {
          auto it = freqs[j].find(v);
          hh.counts[holders[j]->name()] = it == freqs[j].end() ? 0 : it->second;
        }
        entry.values.push_back(std::move(hh));
      }
    }
    report.attributes.push_back(std::move(entry));
  }
  return report;
}

}  // namespace skewjoin
