#include "dmd/dyn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dmd/errors.hpp"
#include "dmd/tradeoff.hpp"

namespace dmd {

namespace {

PiecewiseLinearConcave terminal_function() {
  return PiecewiseLinearConcave({{0.0, 0.0}}, PiecewiseLinearConcave::Extension::Constant);
}

std::int64_t state_key(double c) { return std::llround(c * 1e12); }

double clamp_state(double c) {
  if (c < -1e-9) throw std::domain_error("dyn: negative state");
  return std::max(c, 0.0);
}

std::size_t report_index(const DiscreteDistribution& d, double report) {
  for (std::size_t j = 0; j < d.size(); ++j)
    if (std::abs(d.value(j) - report) <= 1e-9) return j;
  throw std::invalid_argument("dyn: report outside support");
}

}  // namespace

std::vector<PiecewiseLinearConcave> backward_pass(const std::vector<DiscreteDistribution>& dists,
                                                  double delta_prime, bool parallel) {
  if (dists.empty()) throw std::invalid_argument("backward_pass: no periods");
  if (!(delta_prime > 0)) throw std::invalid_argument("backward_pass: delta_prime must be > 0");
  const std::size_t k = dists.size();
  std::vector<double> w(k + 1, 0.0);  // remaining welfare from period i on
  for (std::size_t i = k; i-- > 0;) w[i] = w[i + 1] + dists[i].expected_value();

  PiecewiseLinearConcave terminal = terminal_function();
  std::vector<PiecewiseLinearConcave> funcs;
  funcs.reserve(k);
  // funcs is built back to front: funcs[k-1-i] holds period (i+1)'s function
  // until the final reverse.
  for (std::size_t period = k; period-- > 0;) {
    const PiecewiseLinearConcave& next = funcs.empty() ? terminal : funcs.back();
    PiecewiseLinearConcave g = (period == 0) ? next.add_linear(-1.0) : next;
    const DiscreteDistribution& d = dists[period];
    auto eval = [&](double c) {
      auto res = solve_tradeoff({d, c, g, BoundMode::Tight});
      if (!res) throw std::runtime_error("backward_pass: infeasible tradeoff inside domain");
      return res->value;
    };
    funcs.push_back(adaptive_concave_fit(eval, 0.0, w[period], delta_prime, parallel));
  }
  std::reverse(funcs.begin(), funcs.end());
  return funcs;
}

OptimalPolicy::OptimalPolicy(std::vector<DiscreteDistribution> dists, double delta_prime,
                             bool parallel)
    : dists_(std::move(dists)),
      terminal_(terminal_function()),
      gtilde_(backward_pass(dists_, delta_prime, parallel)),
      delta_prime_(delta_prime) {
  const PiecewiseLinearConcave& g1 = gtilde_.front();
  auto [c, v] = g1.argmax();

  // The fitted argmax is off by up to one grid cell. The true level-1 value
  // (exact tradeoff LP against the stored continuation) is concave, so a
  // golden-section search between the neighboring breakpoints recovers the
  // maximizer to machine-level accuracy.
  const PiecewiseLinearConcave g = (periods() > 1 ? gtilde_[1] : terminal_).add_linear(-1.0);
  auto exact = [&](double cc) {
    auto res = solve_tradeoff({dists_.front(), cc, g, BoundMode::Tight});
    if (!res) throw std::runtime_error("OptimalPolicy: infeasible initial state");
    return res->value;
  };
  double a = g1.domain_lo(), b = g1.domain_hi();
  for (std::size_t i = 0; i < g1.num_breakpoints(); ++i) {
    if (g1.xs()[i] < c) a = g1.xs()[i];
    if (g1.xs()[i] > c) {
      b = g1.xs()[i];
      break;
    }
  }
  if (b - a > 1e-12) {
    constexpr double kGolden = 0.6180339887498949;
    double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
    double f1 = exact(x1), f2 = exact(x2);
    for (int it = 0; it < 200 && b - a > 1e-11; ++it) {
      if (f1 >= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kGolden * (b - a);
        f1 = exact(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kGolden * (b - a);
        f2 = exact(x2);
      }
    }
    double mid = 0.5 * (a + b);
    double fmid = exact(mid);
    if (fmid > v) {
      c = mid;
      v = fmid;
    }
  }
  c0_ = c;
  predicted_ = v;
}

const StaticMechanism& OptimalPolicy::stage_mechanism(std::size_t i, double c) const {
  if (i < 1 || i > periods()) throw std::invalid_argument("stage_mechanism: bad period");
  c = clamp_state(c);
  auto key = std::make_pair(i, state_key(c));
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return *it->second;
  }
  const PiecewiseLinearConcave& next = i < periods() ? gtilde_[i] : terminal_;
  PiecewiseLinearConcave g = (i == 1) ? next.add_linear(-1.0) : next;
  auto res = solve_tradeoff({dists_[i - 1], c, g, BoundMode::Tight});
  if (!res) throw std::runtime_error("stage_mechanism: infeasible state");
  auto mech = std::make_unique<StaticMechanism>(std::move(res->mechanism));
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = cache_.emplace(key, std::move(mech)).first;
  return *it->second;
}

ExecutionTrace execute(const OptimalPolicy& policy, const std::vector<double>& reports) {
  if (reports.size() != policy.periods()) throw std::invalid_argument("execute: wrong trace length");
  const std::size_t k = policy.periods();
  ExecutionTrace trace;
  double c = policy.c0();
  for (std::size_t i = 1; i <= k; ++i) {
    const DiscreteDistribution& d = policy.dists()[i - 1];
    std::size_t j = report_index(d, reports[i - 1]);
    const StaticMechanism& m = policy.stage_mechanism(i, c);
    double v = d.value(j);
    double x = m.alloc[j];
    double phat = m.pay[j];
    double charged = i < k ? v * x : phat;
    double state_out = v * x - phat;
    trace.push_back({v, x, charged, phat, v * x - charged, state_out});
    c = clamp_state(state_out);
  }
  return trace;
}

namespace {

void check_tree_size(const std::vector<DiscreteDistribution>& dists) {
  std::size_t leaves = 1;
  for (const auto& d : dists) {
    if (leaves > 1000000 / d.size()) throw ResourceLimitError("dyn: history tree too large");
    leaves *= d.size();
  }
}

}  // namespace

double expected_revenue(const OptimalPolicy& policy) {
  check_tree_size(policy.dists());
  const std::size_t k = policy.periods();
  std::map<std::pair<std::size_t, std::int64_t>, double> memo;
  auto rec = [&](auto&& self, std::size_t i, double c) -> double {
    if (i > k) return 0.0;
    c = clamp_state(c);
    auto key = std::make_pair(i, state_key(c));
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    const DiscreteDistribution& d = policy.dists()[i - 1];
    const StaticMechanism& m = policy.stage_mechanism(i, c);
    double acc = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
      double v = d.value(j);
      double charged = i < k ? v * m.alloc[j] : m.pay[j];
      double state = v * m.alloc[j] - m.pay[j];
      acc += d.prob(j) * (charged + self(self, i + 1, state));
    }
    memo[key] = acc;
    return acc;
  };
  return rec(rec, 1, policy.c0());
}

HistoryTree policy_tree(const OptimalPolicy& policy) {
  HistoryTree t = HistoryTree::shape_of(policy.dists());
  const std::size_t k = policy.periods();
  std::vector<double> states{clamp_state(policy.c0())};
  for (std::size_t i = 0; i < k; ++i) {
    const DiscreteDistribution& d = t.dists[i];
    std::vector<double> next_states(t.nodes(i));
    for (std::size_t node = 0; node < t.nodes(i); ++node) {
      double c = states[node / d.size()];
      std::size_t j = node % d.size();
      const StaticMechanism& m = policy.stage_mechanism(i + 1, c);
      double v = d.value(j);
      t.x[i][node] = m.alloc[j];
      t.p[i][node] = i + 1 < k ? v * m.alloc[j] : m.pay[j];  // original payments
      next_states[node] = clamp_state(v * m.alloc[j] - m.pay[j]);
    }
    states = std::move(next_states);
  }
  return t;
}

VerifyReport verify(const OptimalPolicy& policy) {
  HistoryTree t = policy_tree(policy);
  TreeVerifyReport tr = verify_tree(t);
  double max_pre = 0.0;
  const std::size_t k = policy.periods();
  for (std::size_t i = 0; i + 1 < k; ++i)
    for (std::size_t node = 0; node < t.nodes(i); ++node) {
      double u = t.dists[i].value(t.value_index(i, node)) * t.x[i][node] - t.p[i][node];
      max_pre = std::max(max_pre, std::abs(u));
    }
  return {tr.max_pic_violation, tr.min_stage_utility, max_pre};
}

}  // namespace dmd
