#pragma once

#include <cstddef>
#include <vector>

namespace dmd {

// Finite-support value distribution for one selling period.
// Immutable after construction.
class DiscreteDistribution {
 public:
  DiscreteDistribution(std::vector<double> support, std::vector<double> probs);

  std::size_t size() const { return support_.size(); }
  double value(std::size_t j) const { return support_[j]; }
  double prob(std::size_t j) const { return probs_[j]; }
  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& probs() const { return probs_; }

  double expected_value() const { return mean_; }
  // Pr[v >= support[j]]
  double tail(std::size_t j) const { return tails_[j]; }
  // Pr[v <= support[j]]
  double cdf(std::size_t j) const { return 1.0 - (j + 1 < tails_.size() ? tails_[j + 1] : 0.0); }

 private:
  std::vector<double> support_;
  std::vector<double> probs_;
  std::vector<double> tails_;
  double mean_ = 0.0;
};

// Support {1..T}; Pr[v=j] = 1/j - 1/(j+1) for j < T, Pr[v=T] = 1/T.
// Every posted price in the support earns expected revenue 1.
DiscreteDistribution equal_revenue_discrete(int T);

struct MonopolyResult {
  double price;
  double revenue;
};

// argmax over support of p * Pr[v >= p]; ties toward the lowest price.
MonopolyResult monopoly(const DiscreteDistribution& d);

// Forward-difference virtual value; diagnostics only.
// phi_j = v_j - Pr[v > v_j] * (v_{j+1} - v_j) / f_j, phi at the top = v_s.
double virtual_value(const DiscreteDistribution& d, std::size_t j);

struct PricePoint {
  double price;
  double utility;  // E[(v - p)^+]
  double surplus;  // E[v * 1{v >= p}]
};

// One point per support price plus one virtual price above the top (nobody buys).
std::vector<PricePoint> price_curves(const DiscreteDistribution& d);

}  // namespace dmd
