#pragma once

#include <optional>
#include <utility>

#include "dmd/dist.hpp"
#include "dmd/pwl.hpp"
#include "dmd/statmech.hpp"

namespace dmd {

enum class BoundMode { Tight, AtMost };

// Maximize E[v x(v) + g(u(v))] over IC mechanisms with E[u] {=,<=} c and
// every u(v) >= domain_lo(g).
struct TradeoffInstance {
  const DiscreteDistribution& d;
  double c;
  const PiecewiseLinearConcave& g;
  BoundMode mode = BoundMode::Tight;
};

struct TradeoffResult {
  StaticMechanism mechanism;
  double value;
};

// Epigraph LP; nullopt when infeasible.
std::optional<TradeoffResult> solve_tradeoff(const TradeoffInstance& t);

struct StepAllocation {
  double alpha;  // allocation at or below nu
  double nu;     // threshold (support value)
  double shift;  // utility of the lowest type
};

// Restricted search over step allocations (alpha below a threshold, 1 above)
// with chain-tight payments and an optimized uniform utility shift, under the
// at-most-c expected utility constraint and u >= domain_lo(g).
std::pair<StepAllocation, double> best_step_allocation(const DiscreteDistribution& d, double c,
                                                       const PiecewiseLinearConcave& g,
                                                       int alpha_grid = 1000);

// Mechanism realizing a step allocation (chain-tight payments plus shift).
StaticMechanism step_mechanism(const DiscreteDistribution& d, const StepAllocation& s);

}  // namespace dmd
