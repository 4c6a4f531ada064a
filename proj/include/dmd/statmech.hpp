#pragma once

#include <utility>
#include <vector>

#include "dmd/dist.hpp"

namespace dmd {

// Single-period mechanism over a discrete support: expected allocation
// probability and expected payment per support point.
struct StaticMechanism {
  std::vector<double> alloc;
  std::vector<double> pay;

  double utility(const DiscreteDistribution& d, std::size_t j) const {
    return d.value(j) * alloc[j] - pay[j];
  }
};

struct MechanismStats {
  double revenue;
  double surplus;
  double expected_utility;
  double min_utility;
  double max_ic_violation;  // max over ordered pairs of deviation gain
};

MechanismStats evaluate(const StaticMechanism& m, const DiscreteDistribution& d);

// Maximize expected surplus subject to IC, pointwise IR, E[u] = c.
// Solved by mixing at most two posted prices on the concave hull of the
// (utility, surplus) price curve; for c >= E[v] the item is free and the
// buyer additionally receives c - E[v].
std::pair<StaticMechanism, double> utility_constrained_surplus(const DiscreteDistribution& d,
                                                               double c);

// Adds delta to every payment; IC is preserved, every utility drops by delta.
StaticMechanism shift_payments(const StaticMechanism& m, double delta);

}  // namespace dmd
