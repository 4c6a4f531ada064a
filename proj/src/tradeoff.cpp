#include "dmd/tradeoff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dmd/lp.hpp"

namespace dmd {

std::optional<TradeoffResult> solve_tradeoff(const TradeoffInstance& t) {
  const DiscreteDistribution& d = t.d;
  const PiecewiseLinearConcave& g = t.g;
  const std::size_t s = d.size();
  // Variables: x_j | u_j | t_j  (t_j = epigraph of g(u_j)).
  LinearProgram lp(3 * s);
  auto xv = [&](std::size_t j) { return j; };
  auto uv = [&](std::size_t j) { return s + j; };
  auto tv = [&](std::size_t j) { return 2 * s + j; };
  for (std::size_t j = 0; j < s; ++j) {
    lp.set_bounds(xv(j), 0.0, 1.0);
    lp.set_bounds(uv(j), g.domain_lo(), kInf);
    lp.set_bounds(tv(j), -kInf, kInf);
    lp.set_objective(xv(j), d.prob(j) * d.value(j));
    lp.set_objective(tv(j), d.prob(j));
  }
  // All-pairs IC: u_j - u_l - (v_j - v_l) x_l >= 0.
  for (std::size_t j = 0; j < s; ++j)
    for (std::size_t l = 0; l < s; ++l) {
      if (l == j) continue;
      lp.add_row({{uv(j), 1.0}, {uv(l), -1.0}, {xv(l), -(d.value(j) - d.value(l))}}, Rel::GE, 0.0);
    }
  // Expected utility bound.
  {
    std::vector<std::pair<std::size_t, double>> row;
    for (std::size_t j = 0; j < s; ++j) row.emplace_back(uv(j), d.prob(j));
    lp.add_row(std::move(row), t.mode == BoundMode::Tight ? Rel::EQ : Rel::LE, t.c);
  }
  // Epigraph: t_j below every supporting line of g.
  const auto& gx = g.xs();
  const auto& gy = g.ys();
  for (std::size_t j = 0; j < s; ++j) {
    for (std::size_t i = 0; i + 1 < gx.size(); ++i) {
      double slope = (gy[i + 1] - gy[i]) / (gx[i + 1] - gx[i]);
      lp.add_row({{tv(j), 1.0}, {uv(j), -slope}}, Rel::LE, gy[i] - slope * gx[i]);
    }
    double e = g.extension_slope();
    lp.add_row({{tv(j), 1.0}, {uv(j), -e}}, Rel::LE, gy.back() - e * gx.back());
  }

  LPSolution sol = solve(lp);
  if (sol.status == LPStatus::Infeasible) return std::nullopt;
  if (sol.status != LPStatus::Optimal) throw std::runtime_error("solve_tradeoff: unbounded LP");
  TradeoffResult res;
  res.mechanism.alloc.resize(s);
  res.mechanism.pay.resize(s);
  for (std::size_t j = 0; j < s; ++j) {
    double x = std::clamp(sol.x[xv(j)], 0.0, 1.0);
    res.mechanism.alloc[j] = x;
    res.mechanism.pay[j] = d.value(j) * x - sol.x[uv(j)];
  }
  res.value = sol.objective;
  return res;
}

namespace {

// Utilities of a monotone allocation with chain-tight payments and zero
// lowest-type utility.
std::vector<double> chain_utilities(const DiscreteDistribution& d, const std::vector<double>& x) {
  std::vector<double> u(d.size(), 0.0);
  for (std::size_t j = 1; j < d.size(); ++j)
    u[j] = u[j - 1] + x[j - 1] * (d.value(j) - d.value(j - 1));
  return u;
}

std::vector<double> step_alloc(const DiscreteDistribution& d, double alpha, std::size_t nu_idx) {
  std::vector<double> x(d.size());
  for (std::size_t j = 0; j < d.size(); ++j) x[j] = j <= nu_idx ? alpha : 1.0;
  return x;
}

}  // namespace

std::pair<StepAllocation, double> best_step_allocation(const DiscreteDistribution& d, double c,
                                                       const PiecewiseLinearConcave& g,
                                                       int alpha_grid) {
  if (c < 0) throw std::invalid_argument("best_step_allocation: negative c");
  const double lo = g.domain_lo();
  bool found = false;
  StepAllocation best{};
  double best_value = 0.0;

  for (std::size_t nu = 0; nu < d.size(); ++nu) {
    for (int a = 0; a <= alpha_grid; ++a) {
      double alpha = static_cast<double>(a) / alpha_grid;
      std::vector<double> x = step_alloc(d, alpha, nu);
      std::vector<double> u = chain_utilities(d, x);
      double eu = 0.0, surplus = 0.0;
      for (std::size_t j = 0; j < d.size(); ++j) {
        eu += d.prob(j) * u[j];
        surplus += d.prob(j) * d.value(j) * x[j];
      }
      double s_max = c - eu;
      if (s_max < lo - 1e-12) continue;  // no feasible shift
      s_max = std::max(s_max, lo);
      // The objective is concave PWL in the shift: candidates are the range
      // ends and every breakpoint preimage.
      std::vector<double> shifts{lo, s_max};
      for (double b : g.xs())
        for (double uj : u) {
          double sft = b - uj;
          if (sft > lo && sft < s_max) shifts.push_back(sft);
        }
      for (double sft : shifts) {
        double val = surplus;
        bool ok = true;
        for (std::size_t j = 0; j < d.size(); ++j) {
          double arg = std::max(u[j] + sft, lo);
          auto y = g.evaluate(arg);
          if (!y) {
            ok = false;
            break;
          }
          val += d.prob(j) * *y;
        }
        if (ok && (!found || val > best_value)) {
          found = true;
          best_value = val;
          best = {alpha, d.value(nu), sft};
        }
      }
    }
  }
  if (!found) throw std::runtime_error("best_step_allocation: no feasible step");
  return {best, best_value};
}

StaticMechanism step_mechanism(const DiscreteDistribution& d, const StepAllocation& s) {
  std::size_t nu_idx = 0;
  for (std::size_t j = 0; j < d.size(); ++j)
    if (d.value(j) <= s.nu) nu_idx = j;
  std::vector<double> x = step_alloc(d, s.alpha, nu_idx);
  std::vector<double> u = chain_utilities(d, x);
  StaticMechanism m;
  m.alloc = x;
  m.pay.resize(d.size());
  for (std::size_t j = 0; j < d.size(); ++j)
    m.pay[j] = d.value(j) * x[j] - (u[j] + s.shift);
  return m;
}

}  // namespace dmd
