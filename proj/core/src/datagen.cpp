#include "skewjoin/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "skewjoin/hashing.hpp"

namespace skewjoin {

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

}  // namespace

ZipfSampler::ZipfSampler(std::uint64_t universe, double exponent) {
  if (universe == 0) throw std::invalid_argument("zipf universe must be nonempty");
  cdf_.resize(universe);
  double acc = 0.0;
  for (std::uint64_t i = 0; i < universe; ++i) {
    acc += 1.0 / std::pow(static_cast<double>(i + 1), exponent);
    cdf_[i] = acc;
  }
  for (auto& c : cdf_) c /= acc;
}

std::uint64_t ZipfSampler::rank(double u) const {
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<std::uint64_t>(it - cdf_.begin()) + 1;
}

RelationInstance generate_skewed(const RelationSchema& schema, std::uint64_t n, const SkewOptions& options) {
  std::map<Attribute, double> planted_share;
  for (const auto& p : options.planted) {
    if (!schema.contains(p.attribute)) {
      throw std::invalid_argument("planted attribute " + p.attribute + " is not in relation " + schema.name());
    }
    if (!(p.fraction > 0.0 && p.fraction < 1.0)) {
      throw std::invalid_argument("planted fraction must lie in (0, 1), got " + std::to_string(p.fraction));
    }
    planted_share[p.attribute] += p.fraction;
  }
  for (const auto& [attr, sum] : planted_share) {
    if (sum >= 1.0) throw std::invalid_argument("planted fractions of " + attr + " sum to >= 1");
  }

  const std::uint64_t universe = options.universe ? options.universe : std::max<std::uint64_t>(10 * n, 1);
  std::mt19937_64 rng(options.seed);
  std::vector<std::vector<Value>> columns;
  for (const auto& attr : schema.attributes()) {
    std::vector<Value> col;
    col.reserve(n);
    std::set<Value> reserved;
    for (const auto& p : options.planted) {
      if (p.attribute != attr) continue;
      reserved.insert(p.value);
      const auto count = static_cast<std::uint64_t>(std::floor(p.fraction * static_cast<double>(n)));
      col.insert(col.end(), count, p.value);
    }
    auto z = options.zipf.find(attr);
    const double exponent = z == options.zipf.end() ? 0.0 : z->second;
    std::optional<ZipfSampler> sampler;
    if (exponent > 0.0) sampler.emplace(universe, exponent);
    while (col.size() < n) {
      auto rank = sampler ? sampler->rank(unit(rng)) : 1 + below(rng, universe);
      auto v = std::to_string(rank);
      if (reserved.count(v)) continue;
      col.push_back(std::move(v));
    }
    for (std::uint64_t i = n; i > 1; --i) std::swap(col[i - 1], col[below(rng, i)]);
    columns.push_back(std::move(col));
  }

  RelationInstance inst(schema);
  for (std::uint64_t i = 0; i < n; ++i) {
    Tuple t;
    t.reserve(columns.size());
    for (auto& col : columns) t.push_back(std::move(col[i]));
    inst.add(std::move(t));
  }
  return inst;
}

Database generate_database(const JoinQuery& query, std::uint64_t n, double join_zipf,
                           const std::vector<PlantedValue>& planted, std::uint64_t seed, std::uint64_t universe) {
  Database db;
  const auto joins = query.join_attributes();
  for (std::size_t i = 0; i < query.relations().size(); ++i) {
    const auto& schema = query.relations()[i];
    SkewOptions opts;
    opts.seed = mix64(seed ^ mix64(i + 1));
    opts.universe = universe;
    for (const auto& a : schema.attributes()) {
      if (join_zipf > 0.0 && std::find(joins.begin(), joins.end(), a) != joins.end()) opts.zipf[a] = join_zipf;
    }
    for (const auto& p : planted) {
      if (schema.contains(p.attribute)) opts.planted.push_back(p);
    }
    db.put(generate_skewed(schema, n, opts));
  }
  return db;
}

}  // namespace skewjoin
