#include "dmd/approx.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "dmd/errors.hpp"
#include "dmd/lp.hpp"

namespace dmd {

namespace {

PiecewiseLinearConcave terminal_function() {
  return PiecewiseLinearConcave({{0.0, 0.0}}, PiecewiseLinearConcave::Extension::Constant);
}

double clamp_state(double c) {
  if (c < -1e-9) throw std::domain_error("approx: negative state");
  return std::max(c, 0.0);
}

std::int64_t state_key(double c) { return std::llround(c * 1e12); }

// max over Y in [0,1] of E[h(Y(v - E[v]) + c)] + Y E[v]; exact via candidate
// enumeration (the objective is PWL concave in Y).
std::pair<double, double> best_constant_allocation(const DiscreteDistribution& d, double c,
                                                   const PiecewiseLinearConcave& h) {
  const double ev = d.expected_value();
  const double lo = h.domain_lo();
  double y_max = 1.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    double drift = d.value(j) - ev;
    if (drift < 0) y_max = std::min(y_max, (c - lo) / (-drift));
  }
  y_max = std::clamp(y_max, 0.0, 1.0);

  std::vector<double> cands{0.0, y_max};
  for (std::size_t j = 0; j < d.size(); ++j) {
    double drift = d.value(j) - ev;
    if (drift == 0.0) continue;
    for (double b : h.xs()) {
      double y = (b - c) / drift;
      if (y > 0.0 && y < y_max) cands.push_back(y);
    }
  }
  std::sort(cands.begin(), cands.end());

  double best_y = 0.0, best_v = -kInf;
  for (double y : cands) {
    double val = y * ev;
    bool ok = true;
    for (std::size_t j = 0; j < d.size(); ++j) {
      double arg = y * (d.value(j) - ev) + c;
      auto hv = h.evaluate(std::max(arg, lo));
      if (!hv) {
        ok = false;
        break;
      }
      val += d.prob(j) * *hv;
    }
    if (ok && val > best_v) {
      best_v = val;
      best_y = y;
    }
  }
  if (best_v == -kInf) throw std::runtime_error("approx: no feasible allocation");
  return {best_y, best_v};
}

}  // namespace

std::vector<PiecewiseLinearConcave> backward_pass_h(const std::vector<DiscreteDistribution>& dists,
                                                    double delta_prime, bool parallel) {
  if (dists.empty()) throw std::invalid_argument("backward_pass_h: no periods");
  const std::size_t k = dists.size();
  double w1 = 0.0;
  for (const auto& d : dists) w1 += d.expected_value();

  PiecewiseLinearConcave terminal = terminal_function();
  std::vector<PiecewiseLinearConcave> funcs;
  funcs.reserve(k);
  for (std::size_t period = k; period-- > 0;) {
    const PiecewiseLinearConcave& next = funcs.empty() ? terminal : funcs.back();
    const DiscreteDistribution& d = dists[period];
    auto eval = [&](double c) { return best_constant_allocation(d, c, next).second; };
    funcs.push_back(adaptive_concave_fit(eval, 0.0, w1, delta_prime, parallel));
  }
  std::reverse(funcs.begin(), funcs.end());
  return funcs;
}

ApproxPolicy::ApproxPolicy(std::vector<DiscreteDistribution> dists, double delta_prime,
                           bool parallel)
    : dists_(std::move(dists)),
      terminal_(terminal_function()),
      htilde_(backward_pass_h(dists_, delta_prime, parallel)) {
  auto [c, v] = htilde_.front().add_linear(-1.0).argmax();
  c0_ = c;
  second_term_ = v;
}

double ApproxPolicy::stage_allocation(std::size_t i, double c) const {
  if (i < 1 || i > periods()) throw std::invalid_argument("stage_allocation: bad period");
  c = clamp_state(c);
  const PiecewiseLinearConcave& next = i < periods() ? htilde_[i] : terminal_;
  return best_constant_allocation(dists_[i - 1], c, next).first;
}

double mechanism1_revenue(const std::vector<DiscreteDistribution>& dists) {
  double rev = 0.0;
  for (const auto& d : dists) rev += monopoly(d).revenue;
  return rev;
}

ExecutionTrace execute2(const ApproxPolicy& policy, const std::vector<double>& reports) {
  if (reports.size() != policy.periods())
    throw std::invalid_argument("execute2: wrong trace length");
  const std::size_t k = policy.periods();
  ExecutionTrace trace;
  double c = policy.c0();
  for (std::size_t i = 1; i <= k; ++i) {
    const DiscreteDistribution& d = policy.dists()[i - 1];
    double v = reports[i - 1];
    bool in_support = false;
    for (std::size_t j = 0; j < d.size(); ++j)
      if (std::abs(d.value(j) - v) <= 1e-9) in_support = true;
    if (!in_support) throw std::invalid_argument("execute2: report outside support");
    double y = policy.stage_allocation(i, c);
    double charged = i < k ? v * y : y * d.expected_value() - c;
    double state_out = y * (v - d.expected_value()) + c;
    trace.push_back({v, y, charged, charged, v * y - charged, state_out});
    c = clamp_state(state_out);
  }
  return trace;
}

double expected_revenue2(const ApproxPolicy& policy) {
  {
    std::size_t leaves = 1;
    for (const auto& d : policy.dists()) {
      if (leaves > 1000000 / d.size()) throw ResourceLimitError("approx: history tree too large");
      leaves *= d.size();
    }
  }
  const std::size_t k = policy.periods();
  std::map<std::pair<std::size_t, std::int64_t>, double> memo;
  auto rec = [&](auto&& self, std::size_t i, double c) -> double {
    if (i > k) return 0.0;
    c = clamp_state(c);
    auto key = std::make_pair(i, state_key(c));
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    const DiscreteDistribution& d = policy.dists()[i - 1];
    double y = policy.stage_allocation(i, c);
    double ev = d.expected_value();
    double acc = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
      double v = d.value(j);
      double charged = i < k ? v * y : y * ev - c;
      acc += d.prob(j) * (charged + self(self, i + 1, y * (v - ev) + c));
    }
    memo[key] = acc;
    return acc;
  };
  return rec(rec, 1, policy.c0());
}

double upper_bound(const std::vector<DiscreteDistribution>& dists, double delta_prime,
                   bool parallel) {
  ApproxPolicy p(dists, delta_prime, parallel);
  // The fitted value functions undershoot the true ones by at most delta_prime
  // per level, so pad the bound to keep it valid.
  return mechanism1_revenue(dists) + p.second_term() +
         static_cast<double>(dists.size()) * delta_prime;
}

}  // namespace dmd
