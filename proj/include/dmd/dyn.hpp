#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "dmd/dist.hpp"
#include "dmd/pwl.hpp"
#include "dmd/statmech.hpp"
#include "dmd/tree.hpp"

namespace dmd {

// Backward pass over the cumulative tradeoff functions. Returns the
// approximations for periods 1..k (index 0 = period 1); the terminal function
// (0 on [0, inf)) is implicit. delta_prime is the per-level additive accuracy.
std::vector<PiecewiseLinearConcave> backward_pass(const std::vector<DiscreteDistribution>& dists,
                                                  double delta_prime, bool parallel = true);

// Executable optimal policy: stored value functions plus lazily solved
// per-state stage mechanisms.
class OptimalPolicy {
 public:
  OptimalPolicy(std::vector<DiscreteDistribution> dists, double delta_prime, bool parallel = true);

  std::size_t periods() const { return dists_.size(); }
  const std::vector<DiscreteDistribution>& dists() const { return dists_; }
  const std::vector<PiecewiseLinearConcave>& gtilde() const { return gtilde_; }
  const PiecewiseLinearConcave& terminal() const { return terminal_; }
  double c0() const { return c0_; }
  double delta_prime() const { return delta_prime_; }
  double predicted_revenue() const { return predicted_; }

  // Tight tradeoff at (f_i, c, g_{i+1}); period index i is 1-based. States in
  // [-1e-9, 0) are clamped to 0; anything lower throws std::domain_error.
  // Memoized by (i, c rounded to 1e-12).
  const StaticMechanism& stage_mechanism(std::size_t i, double c) const;

 private:
  std::vector<DiscreteDistribution> dists_;
  PiecewiseLinearConcave terminal_;
  std::vector<PiecewiseLinearConcave> gtilde_;
  double c0_;
  double delta_prime_;
  double predicted_;

  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<std::size_t, std::int64_t>, std::unique_ptr<StaticMechanism>> cache_;
};

inline OptimalPolicy plan(std::vector<DiscreteDistribution> dists, double delta_prime,
                          bool parallel = true) {
  return OptimalPolicy(std::move(dists), delta_prime, parallel);
}

struct StageRecord {
  double report;
  double alloc;
  double charged;           // original-problem payment
  double adjusted_payment;  // p_hat
  double stage_utility;     // report * alloc - charged
  double state_out;
};

using ExecutionTrace = std::vector<StageRecord>;

// Truthful forward execution: pay v*x before the last period, the adjusted
// payment at the last; state follows c_i = v_i x_i - p_hat_i.
ExecutionTrace execute(const OptimalPolicy& policy, const std::vector<double>& reports);

// Exact enumeration over the full report tree (<= 1e6 histories).
double expected_revenue(const OptimalPolicy& policy);

struct VerifyReport {
  double max_pic_violation;
  double min_stage_utility;
  double max_prefinal_stage_utility;  // max |stage utility| over periods < k
};

// Brute force over every reachable state: single-period deviations against
// truthful continuation (misreport-induced states expanded recursively).
VerifyReport verify(const OptimalPolicy& policy);

// Full execution tree of the policy with original payments (for tree-level
// checks and serialization).
HistoryTree policy_tree(const OptimalPolicy& policy);

}  // namespace dmd
