#include "dmd/oracle.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dmd/errors.hpp"
#include "dmd/lp.hpp"

namespace dmd {

namespace {

// Variable layout helper for the single-agent history-tree LP.
struct TreeVars {
  std::vector<std::size_t> x_off, p_off, nodes;
  std::size_t total = 0;

  explicit TreeVars(const std::vector<DiscreteDistribution>& dists) {
    std::size_t n = 1;
    for (const auto& d : dists) {
      n *= d.size();
      nodes.push_back(n);
    }
    for (std::size_t i = 0; i < dists.size(); ++i) {
      x_off.push_back(total);
      total += nodes[i];
      p_off.push_back(total);
      total += nodes[i];
    }
  }
  std::size_t x(std::size_t level, std::size_t node) const { return x_off[level] + node; }
  std::size_t p(std::size_t level, std::size_t node) const { return p_off[level] + node; }
};

}  // namespace

OracleResult global_lp_single(const std::vector<DiscreteDistribution>& dists, bool tight_bounds) {
  if (dists.empty()) throw std::invalid_argument("global_lp_single: no periods");
  {
    std::size_t leaves = 1;
    for (const auto& d : dists) {
      if (leaves > 100000 / d.size()) throw ResourceLimitError("global_lp_single: tree too large");
      leaves *= d.size();
    }
  }
  const std::size_t k = dists.size();
  HistoryTree tree = HistoryTree::shape_of(dists);
  TreeVars vars(dists);
  LinearProgram lp(vars.total);

  for (std::size_t i = 0; i < k; ++i) {
    const DiscreteDistribution& d = dists[i];
    for (std::size_t node = 0; node < tree.nodes(i); ++node) {
      lp.set_bounds(vars.x(i, node), 0.0, 1.0);
      lp.set_bounds(vars.p(i, node), -kInf, kInf);
      // Objective: adjusted payments in period 1, surplus afterwards.
      double pr = tree.path_prob(i, node);
      if (i == 0)
        lp.set_objective(vars.p(i, node), pr);
      else
        lp.set_objective(vars.x(i, node), pr * d.value(tree.value_index(i, node)));
    }
  }

  // Adjacent IC in both directions within every sibling group. For scalar
  // types this implies every longer deviation by the usual chaining argument.
  for (std::size_t i = 0; i < k; ++i) {
    const DiscreteDistribution& d = dists[i];
    const std::size_t s = d.size();
    for (std::size_t node = 0; node < tree.nodes(i); ++node) {
      std::size_t a = tree.value_index(i, node);
      if (a + 1 == s) continue;
      std::size_t hi = node + 1;  // sibling with the next value
      double va = d.value(a), vb = d.value(a + 1);
      // u(hi) >= vb*x(lo) - p(lo):  vb x_hi - p_hi - vb x_lo + p_lo >= 0
      lp.add_row({{vars.x(i, hi), vb}, {vars.p(i, hi), -1.0}, {vars.x(i, node), -vb},
                  {vars.p(i, node), 1.0}},
                 Rel::GE, 0.0);
      // u(lo) >= va*x(hi) - p(hi)
      lp.add_row({{vars.x(i, node), va}, {vars.p(i, node), -1.0}, {vars.x(i, hi), -va},
                  {vars.p(i, hi), 1.0}},
                 Rel::GE, 0.0);
    }
  }

  // Utility bounds: u_i(node) >= E_{v_{i+1}}[u_{i+1}] for i < k; terminal IR
  // at the lowest sibling (adjacent IC makes u monotone within the group).
  for (std::size_t i = 0; i < k; ++i) {
    const DiscreteDistribution& d = dists[i];
    if (i + 1 < k) {
      const DiscreteDistribution& next = dists[i + 1];
      for (std::size_t node = 0; node < tree.nodes(i); ++node) {
        std::vector<std::pair<std::size_t, double>> row{
            {vars.x(i, node), d.value(tree.value_index(i, node))}, {vars.p(i, node), -1.0}};
        for (std::size_t b = 0; b < next.size(); ++b) {
          std::size_t ch = tree.child(i, node, b);
          row.emplace_back(vars.x(i + 1, ch), -next.prob(b) * next.value(b));
          row.emplace_back(vars.p(i + 1, ch), next.prob(b));
        }
        lp.add_row(std::move(row), tight_bounds ? Rel::EQ : Rel::GE, 0.0);
      }
    } else {
      for (std::size_t node = 0; node < tree.nodes(i); ++node) {
        if (tree.value_index(i, node) != 0) continue;
        lp.add_row({{vars.x(i, node), d.value(0)}, {vars.p(i, node), -1.0}}, Rel::GE, 0.0);
      }
    }
  }

  LPSolution sol = solve(lp);
  if (sol.status != LPStatus::Optimal)
    throw std::runtime_error("global_lp_single: oracle LP not optimal");
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t node = 0; node < tree.nodes(i); ++node) {
      tree.x[i][node] = sol.x[vars.x(i, node)];
      tree.p[i][node] = sol.x[vars.p(i, node)];
    }
  return {sol.objective, std::move(tree)};
}

double global_lp_multi(const std::vector<std::vector<DiscreteDistribution>>& dists) {
  const std::size_t m = dists.size();
  if (m == 0) throw std::invalid_argument("global_lp_multi: no agents");
  const std::size_t k = dists[0].size();
  for (const auto& ag : dists)
    if (ag.size() != k || k == 0) throw std::invalid_argument("global_lp_multi: ragged periods");

  // Joint value profile per period (agent 0 outermost in the radix).
  std::vector<std::size_t> P(k, 1);
  std::vector<std::vector<std::size_t>> stride(k, std::vector<std::size_t>(m, 1));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t kap = m; kap-- > 0;) {
      stride[i][kap] = P[i];
      P[i] *= dists[kap][i].size();
    }
  }
  std::vector<std::size_t> H(k, 1);  // histories through period i
  {
    std::size_t acc = 1;
    for (std::size_t i = 0; i < k; ++i) {
      if (acc > 100000 / P[i]) throw ResourceLimitError("global_lp_multi: tree too large");
      acc *= P[i];
      H[i] = acc;
    }
    if (m * acc > 100000) throw ResourceLimitError("global_lp_multi: too many variables");
  }
  auto agent_value_index = [&](std::size_t i, std::size_t q, std::size_t kap) {
    return (q / stride[i][kap]) % dists[kap][i].size();
  };

  std::vector<std::vector<double>> profile_prob(k);
  for (std::size_t i = 0; i < k; ++i) {
    profile_prob[i].resize(P[i]);
    for (std::size_t q = 0; q < P[i]; ++q) {
      double pr = 1.0;
      for (std::size_t kap = 0; kap < m; ++kap)
        pr *= dists[kap][i].prob(agent_value_index(i, q, kap));
      profile_prob[i][q] = pr;
    }
  }
  std::vector<std::vector<double>> path_prob(k);
  for (std::size_t i = 0; i < k; ++i) {
    path_prob[i].resize(H[i]);
    for (std::size_t h = 0; h < H[i]; ++h) {
      std::size_t g = h / P[i], q = h % P[i];
      path_prob[i][h] = (i == 0 ? 1.0 : path_prob[i - 1][g]) * profile_prob[i][q];
    }
  }

  // Variable layout: x[i][kap][h in H_i], then ph[i][kap][g in H_{i-1}][a].
  std::size_t total = 0;
  std::vector<std::vector<std::size_t>> xoff(k, std::vector<std::size_t>(m)),
      phoff(k, std::vector<std::size_t>(m));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t kap = 0; kap < m; ++kap) {
      xoff[i][kap] = total;
      total += H[i];
      phoff[i][kap] = total;
      total += (i == 0 ? 1 : H[i - 1]) * dists[kap][i].size();
    }
  auto xv = [&](std::size_t i, std::size_t kap, std::size_t h) { return xoff[i][kap] + h; };
  auto phv = [&](std::size_t i, std::size_t kap, std::size_t g, std::size_t a) {
    return phoff[i][kap] + g * dists[kap][i].size() + a;
  };

  LinearProgram lp(total);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t kap = 0; kap < m; ++kap) {
      for (std::size_t h = 0; h < H[i]; ++h) lp.set_bounds(xv(i, kap, h), 0.0, 1.0);
      std::size_t gs = (i == 0 ? 1 : H[i - 1]) * dists[kap][i].size();
      for (std::size_t t = 0; t < gs; ++t) lp.set_bounds(phoff[i][kap] + t, -kInf, kInf);
    }

  // Objective: first-period adjusted payments plus later surplus.
  for (std::size_t kap = 0; kap < m; ++kap)
    for (std::size_t a = 0; a < dists[kap][0].size(); ++a)
      lp.set_objective(phv(0, kap, 0, a), dists[kap][0].prob(a));
  for (std::size_t i = 1; i < k; ++i)
    for (std::size_t kap = 0; kap < m; ++kap)
      for (std::size_t h = 0; h < H[i]; ++h) {
        std::size_t q = h % P[i];
        lp.set_objective(xv(i, kap, h),
                         path_prob[i][h] * dists[kap][i].value(agent_value_index(i, q, kap)));
      }

  // Interim allocation of (i, kap, g, a): expectation over opponents' period-i
  // values, as sparse terms into a row with the given sign.
  auto add_interim_alloc = [&](std::vector<std::pair<std::size_t, double>>& row, std::size_t i,
                               std::size_t kap, std::size_t g, std::size_t a, double coeff) {
    double fa = dists[kap][i].prob(a);
    for (std::size_t q = 0; q < P[i]; ++q) {
      if (agent_value_index(i, q, kap) != a) continue;
      row.emplace_back(xv(i, kap, g * P[i] + q), coeff * profile_prob[i][q] / fa);
    }
  };
  // Expected next-period interim utility after history h in H_i.
  auto add_next_utility = [&](std::vector<std::pair<std::size_t, double>>& row, std::size_t i,
                              std::size_t kap, std::size_t h, double coeff) {
    for (std::size_t q = 0; q < P[i + 1]; ++q) {
      std::size_t a = agent_value_index(i + 1, q, kap);
      row.emplace_back(xv(i + 1, kap, h * P[i + 1] + q),
                       coeff * profile_prob[i + 1][q] * dists[kap][i + 1].value(a));
    }
    for (std::size_t a = 0; a < dists[kap][i + 1].size(); ++a)
      row.emplace_back(phv(i + 1, kap, h, a), -coeff * dists[kap][i + 1].prob(a));
  };

  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t kap = 0; kap < m; ++kap) {
      std::size_t gcount = i == 0 ? 1 : H[i - 1];
      const DiscreteDistribution& dk = dists[kap][i];
      for (std::size_t g = 0; g < gcount; ++g) {
        // All-pairs interim IC.
        for (std::size_t a = 0; a < dk.size(); ++a)
          for (std::size_t a2 = 0; a2 < dk.size(); ++a2) {
            if (a2 == a) continue;
            std::vector<std::pair<std::size_t, double>> row;
            add_interim_alloc(row, i, kap, g, a, dk.value(a));
            row.emplace_back(phv(i, kap, g, a), -1.0);
            add_interim_alloc(row, i, kap, g, a2, -dk.value(a));
            row.emplace_back(phv(i, kap, g, a2), 1.0);
            lp.add_row(std::move(row), Rel::GE, 0.0);
          }
        // Interim utility bound / terminal interim IR.
        for (std::size_t a = 0; a < dk.size(); ++a) {
          std::vector<std::pair<std::size_t, double>> row;
          add_interim_alloc(row, i, kap, g, a, dk.value(a));
          row.emplace_back(phv(i, kap, g, a), -1.0);
          if (i + 1 < k) {
            double fa = dk.prob(a);
            for (std::size_t q = 0; q < P[i]; ++q) {
              if (agent_value_index(i, q, kap) != a) continue;
              add_next_utility(row, i, kap, g * P[i] + q, -profile_prob[i][q] / fa);
            }
          }
          lp.add_row(std::move(row), Rel::GE, 0.0);
        }
      }
    }

  // One unit per period.
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t h = 0; h < H[i]; ++h) {
      std::vector<std::pair<std::size_t, double>> row;
      for (std::size_t kap = 0; kap < m; ++kap) row.emplace_back(xv(i, kap, h), 1.0);
      lp.add_row(std::move(row), Rel::LE, 1.0);
    }

  LPSolution sol = solve(lp);
  if (sol.status != LPStatus::Optimal)
    throw std::runtime_error("global_lp_multi: oracle LP not optimal");
  return sol.objective;
}

double markov_lp(const DiscreteDistribution& d, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("markov_lp: delta outside (0,1)");
  const std::size_t s = d.size();
  if (s * s > 10000) throw ResourceLimitError("markov_lp: support too large");
  // Variables: x(v0, v1) then p(v0, v1), row-major in (v0, v1).
  auto xv = [&](std::size_t a, std::size_t b) { return a * s + b; };
  auto pv = [&](std::size_t a, std::size_t b) { return s * s + a * s + b; };
  LinearProgram lp(2 * s * s);
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = 0; b < s; ++b) {
      lp.set_bounds(xv(a, b), 0.0, 1.0);
      lp.set_bounds(pv(a, b), -kInf, kInf);
      lp.set_objective(pv(a, b), d.prob(a) * d.prob(b));
    }
  // One-stage-lookahead IC: truth-telling today beats any misreport,
  // accounting for the discounted effect on tomorrow's menu.
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = 0; b < s; ++b)
      for (std::size_t b2 = 0; b2 < s; ++b2) {
        if (b2 == b) continue;
        std::vector<std::pair<std::size_t, double>> row{
            {xv(a, b), d.value(b)}, {pv(a, b), -1.0}, {xv(a, b2), -d.value(b)}, {pv(a, b2), 1.0}};
        for (std::size_t nx = 0; nx < s; ++nx) {
          row.emplace_back(xv(b, nx), delta * d.prob(nx) * d.value(nx));
          row.emplace_back(pv(b, nx), -delta * d.prob(nx));
          row.emplace_back(xv(b2, nx), -delta * d.prob(nx) * d.value(nx));
          row.emplace_back(pv(b2, nx), delta * d.prob(nx));
        }
        lp.add_row(std::move(row), Rel::GE, 0.0);
      }
  // Ex-post IR per (previous, current) pair.
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = 0; b < s; ++b)
      lp.add_row({{xv(a, b), d.value(b)}, {pv(a, b), -1.0}}, Rel::GE, 0.0);
  // Adjusted IR: stage utility plus the discounted continuation reward of the
  // current report must cover the average continuation reward. Without this
  // row the seller can run a loyalty scheme (reward high reports with next-day
  // discounts) that strictly beats posting the monopoly price.
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = 0; b < s; ++b) {
      std::vector<std::pair<std::size_t, double>> row{{xv(a, b), d.value(b)}, {pv(a, b), -1.0}};
      for (std::size_t nx = 0; nx < s; ++nx) {
        row.emplace_back(xv(b, nx), delta * d.prob(nx) * d.value(nx));
        row.emplace_back(pv(b, nx), -delta * d.prob(nx));
        for (std::size_t b2 = 0; b2 < s; ++b2) {
          row.emplace_back(xv(b2, nx), -delta * d.prob(b2) * d.prob(nx) * d.value(nx));
          row.emplace_back(pv(b2, nx), delta * d.prob(b2) * d.prob(nx));
        }
      }
      lp.add_row(std::move(row), Rel::GE, 0.0);
    }

  LPSolution sol = solve(lp);
  if (sol.status != LPStatus::Optimal) throw std::runtime_error("markov_lp: LP not optimal");
  return sol.objective;
}

}  // namespace dmd
