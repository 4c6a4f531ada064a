#pragma once

#include <utility>
#include <vector>

#include "dmd/dist.hpp"
#include "dmd/dyn.hpp"
#include "dmd/pwl.hpp"

namespace dmd {

// Value functions of the constant-allocation ("bank balance") mechanism:
//   h_{k+1} = 0 on [0, inf)
//   h_i(c)  = max_{0<=Y<=1} E[h_{i+1}(Y(v_i - E[v_i]) + c)] + Y E[v_i]
// The inner maximum is exact: the objective is PWL concave in Y, so it is
// attained on the breakpoint-preimage candidate set.
std::vector<PiecewiseLinearConcave> backward_pass_h(const std::vector<DiscreteDistribution>& dists,
                                                    double delta_prime, bool parallel = true);

class ApproxPolicy {
 public:
  ApproxPolicy(std::vector<DiscreteDistribution> dists, double delta_prime, bool parallel = true);

  std::size_t periods() const { return dists_.size(); }
  const std::vector<DiscreteDistribution>& dists() const { return dists_; }
  const std::vector<PiecewiseLinearConcave>& htilde() const { return htilde_; }
  const PiecewiseLinearConcave& terminal() const { return terminal_; }
  double c0() const { return c0_; }
  // max_c (h_1(c) - c), the non-monopoly half of the revenue upper bound.
  double second_term() const { return second_term_; }

  // Exact inner maximizer Y at (period i, state c); 1-based i.
  double stage_allocation(std::size_t i, double c) const;

 private:
  std::vector<DiscreteDistribution> dists_;
  PiecewiseLinearConcave terminal_;
  std::vector<PiecewiseLinearConcave> htilde_;
  double c0_;
  double second_term_;
};

inline ApproxPolicy plan_approx(std::vector<DiscreteDistribution> dists, double delta_prime,
                                bool parallel = true) {
  return ApproxPolicy(std::move(dists), delta_prime, parallel);
}

// Sum of per-period monopoly revenues (myopic posted prices).
double mechanism1_revenue(const std::vector<DiscreteDistribution>& dists);

// Constant-allocation execution: allocation Y independent of the report,
// payment v*Y before the last period and Y*E[v_k] - c_{k-1} at the last;
// state follows c_i = Y(v_i - E[v_i]) + c_{i-1}.
ExecutionTrace execute2(const ApproxPolicy& policy, const std::vector<double>& reports);

double expected_revenue2(const ApproxPolicy& policy);

// mechanism1_revenue + max_c(h_1(c) - c) + k * delta_prime (the padding keeps
// the bound valid despite the per-level fitting error): upper bound on the
// optimum.
double upper_bound(const std::vector<DiscreteDistribution>& dists, double delta_prime,
                   bool parallel = true);

}  // namespace dmd
