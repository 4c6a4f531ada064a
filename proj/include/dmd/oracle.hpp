#pragma once

#include <vector>

#include "dmd/dist.hpp"
#include "dmd/tree.hpp"

namespace dmd {

struct OracleResult {
  double value;
  HistoryTree tree;  // adjusted variables (x, p_hat)
};

// Exact optimum of the adjusted problem over the full history tree:
// maximize E[p_hat_1 + sum_{i>=2} v_i x_i] s.t. per-prefix IC, per-prefix
// utility bounds (u_i >= expected next-period utility) and terminal IR.
// tight_bounds turns the utility bounds into equalities (used to confirm they
// may bind at an optimum). Tree size capped at 1e5 leaves.
OracleResult global_lp_single(const std::vector<DiscreteDistribution>& dists,
                              bool tight_bounds = false);

// Interim multi-agent version: dists[agent][period]. One unit per period;
// allocations are per-agent ex-post, IC and utility bounds hold in
// expectation over opponents. Returns the optimal revenue.
double global_lp_multi(const std::vector<std::vector<DiscreteDistribution>>& dists);

// Stationary infinite-horizon mechanism depending on (previous, current)
// report only, discount delta; one-stage-lookahead IC and per-pair IR.
// Returns the per-period optimal revenue.
double markov_lp(const DiscreteDistribution& d, double delta);

}  // namespace dmd
