#include "skewjoin/share_optimizer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace skewjoin {

std::string to_string(IntegerizationMode mode) {
  return mode == IntegerizationMode::kExhaustive ? "exhaustive" : "greedy-round";
}

IntegerizationMode integerization_mode_from_string(const std::string& text) {
  if (text == "exhaustive") return IntegerizationMode::kExhaustive;
  if (text == "greedy-round" || text == "greedy") return IntegerizationMode::kGreedy;
  throw std::invalid_argument("unknown integerization mode " + text);
}

namespace {

// The objective over log-shares u: sum_j c_j * exp(sum_{v in term j} u_v).
class LogPosynomial {
 public:
  LogPosynomial(const CostExpression& expression, const SizeMap& sizes) : vars_(expression.share_attributes) {
    for (const auto& t : expression.terms) {
      auto it = sizes.find(t.relation);
      if (it == sizes.end()) throw std::out_of_range("no size for relation " + t.relation);
      if (it->second == 0) {
        throw std::invalid_argument("relation " + t.relation + " has size 0; prune empty residual joins first");
      }
      std::vector<std::size_t> idx;
      for (const auto& v : t.variables) {
        auto pos = std::find(vars_.begin(), vars_.end(), v);
        idx.push_back(static_cast<std::size_t>(pos - vars_.begin()));
      }
      coeff_.push_back(static_cast<double>(it->second));
      members_.push_back(std::move(idx));
    }
    scale_ = std::accumulate(coeff_.begin(), coeff_.end(), 0.0);
    for (auto& c : coeff_) c /= scale_;
  }

  std::size_t dim() const { return vars_.size(); }
  const std::vector<Attribute>& vars() const { return vars_; }
  double scale() const { return scale_; }

  double value(const Eigen::VectorXd& u) const {
    double f = 0.0;
    for (std::size_t j = 0; j < coeff_.size(); ++j) f += term(j, u);
    return f;
  }

  void derivatives(const Eigen::VectorXd& u, double& f, Eigen::VectorXd& g, Eigen::MatrixXd& h) const {
    const auto n = static_cast<Eigen::Index>(dim());
    f = 0.0;
    g.setZero(n);
    h.setZero(n, n);
    for (std::size_t j = 0; j < coeff_.size(); ++j) {
      const double t = term(j, u);
      f += t;
      for (auto a : members_[j]) {
        g(static_cast<Eigen::Index>(a)) += t;
        for (auto b : members_[j]) h(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += t;
      }
    }
  }

 private:
  double term(std::size_t j, const Eigen::VectorXd& u) const {
    double s = 0.0;
    for (auto a : members_[j]) s += u(static_cast<Eigen::Index>(a));
    return coeff_[j] * std::exp(s);
  }

  std::vector<Attribute> vars_;
  std::vector<double> coeff_;
  std::vector<std::vector<std::size_t>> members_;
  double scale_ = 1.0;
};

struct KktState {
  double multiplier = 0.0;
  double stationarity = 0.0;  // free variables
  double worst_clamped = 0.0;  // clamped variables that want to grow
  Eigen::Index release = -1;
};

KktState kkt(const Eigen::VectorXd& g, double f, const std::vector<bool>& clamped) {
  KktState s;
  double sum = 0.0;
  int nfree = 0;
  for (Eigen::Index v = 0; v < g.size(); ++v) {
    if (!clamped[static_cast<std::size_t>(v)]) {
      sum += g(v);
      ++nfree;
    }
  }
  s.multiplier = nfree ? sum / nfree : 0.0;
  const double denom = std::max(f, std::numeric_limits<double>::min());
  for (Eigen::Index v = 0; v < g.size(); ++v) {
    if (!clamped[static_cast<std::size_t>(v)]) {
      s.stationarity = std::max(s.stationarity, std::abs(g(v) - s.multiplier) / denom);
    } else {
      double violation = (s.multiplier - g(v)) / denom;
      if (violation > s.worst_clamped) {
        s.worst_clamped = violation;
        s.release = v;
      }
    }
  }
  return s;
}

}  // namespace

ContinuousSolution optimize_shares_continuous(const CostExpression& expression, const SizeMap& sizes, double budget,
                                              const OptimizerConfig& config) {
  if (!(budget >= 1.0)) throw std::invalid_argument("share budget must be >= 1");
  if (!(config.tolerance > 0.0)) throw std::invalid_argument("optimizer tolerance must be > 0");
  LogPosynomial objective(expression, sizes);
  ContinuousSolution out;
  const auto n = static_cast<Eigen::Index>(objective.dim());
  const double total = std::log(budget);

  if (n == 0) {
    if (budget > 1.0) throw std::invalid_argument("no share-bearing attribute can absorb a budget above 1");
    out.cost = evaluate_cost(expression, sizes, out.shares);
    return out;
  }

  Eigen::VectorXd u = Eigen::VectorXd::Constant(n, total / static_cast<double>(n));
  std::vector<bool> clamped(static_cast<std::size_t>(n), total == 0.0);
  if (total == 0.0) u.setZero();

  double f = 0.0;
  Eigen::VectorXd g;
  Eigen::MatrixXd h;
  KktState state;
  out.converged = false;
  std::size_t it = 0;
  for (; it < config.max_iterations; ++it) {
    objective.derivatives(u, f, g, h);
    state = kkt(g, f, clamped);
    if (total == 0.0) {
      out.converged = true;
      break;
    }
    if (state.stationarity < config.tolerance) {
      if (state.worst_clamped < config.tolerance) {
        out.converged = true;
        break;
      }
      clamped[static_cast<std::size_t>(state.release)] = false;
      continue;
    }

    std::vector<Eigen::Index> free;
    for (Eigen::Index v = 0; v < n; ++v) {
      if (!clamped[static_cast<std::size_t>(v)]) free.push_back(v);
    }
    const auto m = static_cast<Eigen::Index>(free.size());

    // Equality-constrained Newton step on the current face.
    Eigen::MatrixXd kkt_matrix = Eigen::MatrixXd::Zero(m + 1, m + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
    double diag_max = 0.0;
    for (Eigen::Index a = 0; a < m; ++a) diag_max = std::max(diag_max, h(free[a], free[a]));
    const double ridge = 1e-12 * diag_max + 1e-300;
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) kkt_matrix(a, b) = h(free[a], free[b]);
      kkt_matrix(a, a) += ridge;
      kkt_matrix(a, m) = 1.0;
      kkt_matrix(m, a) = 1.0;
      rhs(a) = -g(free[a]);
    }
    Eigen::VectorXd sol = kkt_matrix.fullPivLu().solve(rhs);

    Eigen::VectorXd dir = Eigen::VectorXd::Zero(n);
    double slope = 0.0;
    bool newton_ok = sol.allFinite();
    if (newton_ok) {
      for (Eigen::Index a = 0; a < m; ++a) dir(free[a]) = sol(a);
      slope = g.dot(dir);
      newton_ok = slope < 0.0;
    }
    if (!newton_ok) {
      dir.setZero();
      for (auto v : free) dir(v) = -(g(v) - state.multiplier);
      slope = g.dot(dir);
    }

    double step_max = std::numeric_limits<double>::infinity();
    Eigen::Index blocking = -1;
    for (auto v : free) {
      if (dir(v) < 0.0) {
        double limit = u(v) / -dir(v);
        if (limit < step_max) {
          step_max = limit;
          blocking = v;
        }
      }
    }
    if (blocking >= 0 && step_max <= 0.0) {
      // Already on the bound and pushing through it: make it active and re-solve.
      u(blocking) = 0.0;
      clamped[static_cast<std::size_t>(blocking)] = true;
      continue;
    }
    double step = std::min(1.0, step_max);
    while (step > 1e-30 && objective.value(u + step * dir) > f + 1e-4 * step * slope) step *= 0.5;
    if (step <= 1e-30) {
      // No further progress is representable; accept the current iterate.
      break;
    }
    u += step * dir;
    if (blocking >= 0 && step == step_max) {
      u(blocking) = 0.0;
      clamped[static_cast<std::size_t>(blocking)] = true;
    }
    for (Eigen::Index v = 0; v < n; ++v) {
      if (u(v) <= 1e-15 * std::max(1.0, total)) {
        u(v) = 0.0;
        clamped[static_cast<std::size_t>(v)] = true;
      }
    }
    // Re-project onto sum(u) == log(budget) across the free variables.
    double drift = total - u.sum();
    std::size_t nfree = 0;
    for (Eigen::Index v = 0; v < n; ++v) nfree += clamped[static_cast<std::size_t>(v)] ? 0 : 1;
    if (nfree == 0) {
      // Rounding clamped everything; restart from the barycentre.
      u.setConstant(total / static_cast<double>(n));
      std::fill(clamped.begin(), clamped.end(), false);
    } else {
      for (Eigen::Index v = 0; v < n; ++v) {
        if (!clamped[static_cast<std::size_t>(v)]) u(v) += drift / static_cast<double>(nfree);
      }
    }
  }
  if (!out.converged) {
    objective.derivatives(u, f, g, h);
    state = kkt(g, f, clamped);
    out.converged = state.stationarity < config.tolerance && state.worst_clamped < config.tolerance;
  }

  out.iterations = it;
  out.kkt_residual = std::max(state.stationarity, state.worst_clamped);
  out.multiplier = state.multiplier * objective.scale();
  for (Eigen::Index v = 0; v < n; ++v) {
    const auto& name = objective.vars()[static_cast<std::size_t>(v)];
    if (clamped[static_cast<std::size_t>(v)]) {
      out.shares.set(name, 1.0);
      out.clamped.push_back(name);
    } else {
      out.shares.set(name, std::exp(u(v)));
    }
  }
  out.cost = evaluate_cost(expression, sizes, out.shares);
  return out;
}

TwoWaySolution two_way_hh_closed_form(double r, double s, double budget) {
  if (!(r > 0.0 && s > 0.0)) throw std::invalid_argument("two-way closed form needs r, s > 0");
  if (!(budget >= 1.0)) throw std::invalid_argument("share budget must be >= 1");
  TwoWaySolution sol;
  sol.x = std::clamp(std::sqrt(budget * r / s), 1.0, budget);
  sol.y = budget / sol.x;
  sol.cost = r * sol.y + s * sol.x;
  return sol;
}

namespace {

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      out.push_back(p);
      n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

std::vector<std::uint64_t> divisors(std::uint64_t n) {
  std::vector<std::uint64_t> small, large;
  for (std::uint64_t d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    small.push_back(d);
    if (d != n / d) large.push_back(n / d);
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

// Integer cost over share slots; slot values are attributes in `vars` order.
class IntegerCost {
 public:
  IntegerCost(const CostExpression& e, const SizeMap& sizes) : vars_(e.share_attributes) {
    for (const auto& t : e.terms) {
      auto it = sizes.find(t.relation);
      if (it == sizes.end()) throw std::out_of_range("no size for relation " + t.relation);
      std::vector<std::size_t> idx;
      for (const auto& v : t.variables) {
        idx.push_back(static_cast<std::size_t>(std::find(vars_.begin(), vars_.end(), v) - vars_.begin()));
      }
      sizes_.push_back(it->second);
      members_.push_back(std::move(idx));
    }
  }

  const std::vector<Attribute>& vars() const { return vars_; }

  // Unset slots (value 0) count as share 1, giving a lower bound for partial vectors.
  std::uint64_t operator()(const std::vector<std::uint64_t>& shares) const {
    std::uint64_t total = 0;
    for (std::size_t j = 0; j < sizes_.size(); ++j) {
      std::uint64_t t = sizes_[j];
      for (auto a : members_[j]) t *= std::max<std::uint64_t>(shares[a], 1);
      total += t;
    }
    return total;
  }

  IntegerShares to_shares(const std::vector<std::uint64_t>& slots) const {
    IntegerShares out;
    for (std::size_t i = 0; i < vars_.size(); ++i) out.set(vars_[i], slots[i]);
    return out;
  }

 private:
  std::vector<Attribute> vars_;
  std::vector<std::uint64_t> sizes_;
  std::vector<std::vector<std::size_t>> members_;
};

std::vector<std::uint64_t> greedy_factorization(const IntegerCost& cost, std::uint64_t budget) {
  std::vector<std::uint64_t> slots(cost.vars().size(), 1);
  auto primes = prime_factors(budget);
  std::sort(primes.rbegin(), primes.rend());
  for (auto p : primes) {
    std::size_t best = 0;
    std::uint64_t best_cost = std::numeric_limits<std::uint64_t>::max();
    for (std::size_t i = 0; i < slots.size(); ++i) {
      slots[i] *= p;
      auto c = cost(slots);
      slots[i] /= p;
      if (c < best_cost) {
        best_cost = c;
        best = i;
      }
    }
    slots[best] *= p;
  }
  return slots;
}

class FactorizationSearch {
 public:
  FactorizationSearch(const IntegerCost& cost, std::size_t node_cap, double lower_bound)
      : cost_(cost), node_cap_(node_cap), lower_bound_(lower_bound) {}

  // Returns false when the node cap was hit before the search finished.
  bool run(std::uint64_t budget, std::vector<std::uint64_t> incumbent) {
    best_ = std::move(incumbent);
    best_cost_ = cost_(best_);
    std::vector<std::uint64_t> slots(best_.size(), 0);
    return visit(slots, 0, budget);
  }

  const std::vector<std::uint64_t>& best() const { return best_; }

 private:
  bool optimal_already() const { return static_cast<double>(best_cost_) <= lower_bound_; }

  bool visit(std::vector<std::uint64_t>& slots, std::size_t pos, std::uint64_t remaining) {
    if (++nodes_ > node_cap_) return false;
    if (optimal_already()) return true;
    if (pos + 1 == slots.size()) {
      slots[pos] = remaining;
      auto c = cost_(slots);
      if (c < best_cost_) {
        best_cost_ = c;
        best_ = slots;
      }
      slots[pos] = 0;
      return true;
    }
    for (auto d : divisors(remaining)) {
      slots[pos] = d;
      // Remaining slots are at least 1, so the partial cost bounds every completion.
      if (cost_(slots) < best_cost_ && !visit(slots, pos + 1, remaining / d)) return false;
    }
    slots[pos] = 0;
    return true;
  }

  const IntegerCost& cost_;
  std::size_t node_cap_;
  double lower_bound_;
  std::size_t nodes_ = 0;
  std::vector<std::uint64_t> best_;
  std::uint64_t best_cost_ = 0;
};

}  // namespace

IntegerSolution integerize_shares(const ContinuousSolution& continuous, const CostExpression& expression,
                                  const SizeMap& sizes, std::uint64_t budget, const OptimizerConfig& config) {
  if (budget < 1) throw std::invalid_argument("share budget must be >= 1");
  IntegerCost cost(expression, sizes);
  IntegerSolution out;
  if (cost.vars().empty()) {
    out.cost = cost({});
    out.exhaustive = true;
    return out;
  }
  auto slots = greedy_factorization(cost, budget);
  out.exhaustive = false;
  if (config.integerization == IntegerizationMode::kExhaustive) {
    // Integer feasible points are continuous feasible points, so the
    // continuous optimum bounds the search from below.
    const double bound = continuous.converged ? std::ceil(continuous.cost * (1.0 - 1e-7)) : 0.0;
    FactorizationSearch search(cost, config.exhaustive_node_cap, bound);
    if (search.run(budget, slots)) {
      out.exhaustive = true;
    }
    slots = search.best();
  }
  out.shares = cost.to_shares(slots);
  out.cost = cost(slots);
  return out;
}

}  // namespace skewjoin
