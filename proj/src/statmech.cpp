#include "dmd/statmech.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dmd/lp.hpp"
#include "dmd/pwl.hpp"

namespace dmd {

MechanismStats evaluate(const StaticMechanism& m, const DiscreteDistribution& d) {
  if (m.alloc.size() != d.size() || m.pay.size() != d.size())
    throw std::invalid_argument("evaluate: size mismatch");
  MechanismStats st{0.0, 0.0, 0.0, kInf, 0.0};
  for (std::size_t j = 0; j < d.size(); ++j) {
    st.revenue += d.prob(j) * m.pay[j];
    st.surplus += d.prob(j) * d.value(j) * m.alloc[j];
    st.min_utility = std::min(st.min_utility, m.utility(d, j));
  }
  st.expected_utility = st.surplus - st.revenue;
  for (std::size_t j = 0; j < d.size(); ++j) {
    double truthful = m.utility(d, j);
    for (std::size_t l = 0; l < d.size(); ++l) {
      if (l == j) continue;
      double deviation = d.value(j) * m.alloc[l] - m.pay[l];
      st.max_ic_violation = std::max(st.max_ic_violation, deviation - truthful);
    }
  }
  st.max_ic_violation = std::max(st.max_ic_violation, 0.0);
  return st;
}

StaticMechanism shift_payments(const StaticMechanism& m, double delta) {
  StaticMechanism out = m;
  for (double& p : out.pay) p += delta;
  return out;
}

namespace {

// Posted price as a mechanism; price <= lowest value means a free item.
StaticMechanism posted(const DiscreteDistribution& d, double price) {
  StaticMechanism m;
  m.alloc.assign(d.size(), 0.0);
  m.pay.assign(d.size(), 0.0);
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (d.value(j) >= price) {
      m.alloc[j] = 1.0;
      m.pay[j] = price;
    }
  }
  return m;
}

StaticMechanism mix(const StaticMechanism& a, const StaticMechanism& b, double beta) {
  StaticMechanism m;
  m.alloc.resize(a.alloc.size());
  m.pay.resize(a.pay.size());
  for (std::size_t j = 0; j < a.alloc.size(); ++j) {
    m.alloc[j] = (1 - beta) * a.alloc[j] + beta * b.alloc[j];
    m.pay[j] = (1 - beta) * a.pay[j] + beta * b.pay[j];
  }
  return m;
}

}  // namespace

std::pair<StaticMechanism, double> utility_constrained_surplus(const DiscreteDistribution& d,
                                                               double c) {
  if (c < 0) throw std::invalid_argument("utility_constrained_surplus: negative c");
  double ev = d.expected_value();
  if (c >= ev) {
    // Free item plus a transfer of c - E[v].
    StaticMechanism m;
    m.alloc.assign(d.size(), 1.0);
    m.pay.assign(d.size(), ev - c);
    return {std::move(m), ev};
  }

  // (utility, surplus) point per posted price, plus the free item at (E[v], E[v]).
  struct Cand {
    double u, s, price;
    bool free_item;
  };
  std::vector<Cand> cands;
  for (const auto& pp : price_curves(d)) cands.push_back({pp.utility, pp.surplus, pp.price, false});
  cands.push_back({ev, ev, 0.0, true});

  std::vector<PiecewiseLinearConcave::Point> pts;
  pts.reserve(cands.size());
  for (const auto& cd : cands) pts.push_back({cd.u, cd.s});
  auto hull =
      PiecewiseLinearConcave::upper_envelope(std::move(pts), PiecewiseLinearConcave::Extension::Constant);

  auto mech_at = [&](double u, double s) {
    // Recover the generating price for a hull vertex.
    for (const auto& cd : cands)
      if (cd.u == u && cd.s == s) return cd.free_item ? posted(d, 0.0) : posted(d, cd.price);
    throw std::logic_error("utility_constrained_surplus: hull vertex lost");
  };

  const auto& xs = hull.xs();
  const auto& ys = hull.ys();
  // c in [0, E[v]) and the hull spans [0, E[v]].
  std::size_t hi = 1;
  while (hi < xs.size() && xs[hi] < c) ++hi;
  if (hi == xs.size()) hi = xs.size() - 1;
  std::size_t lo = hi - 1;
  if (c == xs[lo] || xs.size() == 1) return {mech_at(xs[lo], ys[lo]), ys[lo]};
  if (c == xs[hi]) return {mech_at(xs[hi], ys[hi]), ys[hi]};
  double beta = (c - xs[lo]) / (xs[hi] - xs[lo]);
  double value = ys[lo] + beta * (ys[hi] - ys[lo]);
  return {mix(mech_at(xs[lo], ys[lo]), mech_at(xs[hi], ys[hi]), beta), value};
}

}  // namespace dmd
