#include "dmd/dist.hpp"

#include <cmath>
#include <stdexcept>

namespace dmd {

DiscreteDistribution::DiscreteDistribution(std::vector<double> support, std::vector<double> probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
  if (support_.empty() || support_.size() != probs_.size())
    throw std::invalid_argument("distribution: support/probs size mismatch or empty");
  double total = 0.0;
  for (std::size_t j = 0; j < support_.size(); ++j) {
    if (!(support_[j] >= 0.0)) throw std::invalid_argument("distribution: negative value");
    if (j > 0 && !(support_[j] > support_[j - 1]))
      throw std::invalid_argument("distribution: support not strictly increasing");
    if (!(probs_[j] > 0.0)) throw std::invalid_argument("distribution: non-positive mass");
    total += probs_[j];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("distribution: masses do not sum to 1");
  tails_.assign(support_.size(), 0.0);
  double acc = 0.0;
  for (std::size_t j = support_.size(); j-- > 0;) {
    acc += probs_[j];
    tails_[j] = acc;
    mean_ += support_[j] * probs_[j];
  }
}

DiscreteDistribution equal_revenue_discrete(int T) {
  if (T < 1) throw std::invalid_argument("equal_revenue_discrete: T must be positive");
  std::vector<double> support(T), probs(T);
  for (int j = 1; j <= T; ++j) {
    support[j - 1] = j;
    probs[j - 1] = (j < T) ? 1.0 / j - 1.0 / (j + 1) : 1.0 / T;
  }
  // Telescoping sum is 1 up to rounding; normalize the residue away.
  double total = 0.0;
  for (double f : probs) total += f;
  for (double& f : probs) f /= total;
  return DiscreteDistribution(std::move(support), std::move(probs));
}

MonopolyResult monopoly(const DiscreteDistribution& d) {
  MonopolyResult best{d.value(0), d.value(0) * d.tail(0)};
  for (std::size_t j = 1; j < d.size(); ++j) {
    double rev = d.value(j) * d.tail(j);
    if (rev > best.revenue) best = {d.value(j), rev};
  }
  return best;
}

double virtual_value(const DiscreteDistribution& d, std::size_t j) {
  if (j >= d.size()) throw std::out_of_range("virtual_value: index out of range");
  if (j + 1 == d.size()) return d.value(j);
  double above = d.tail(j + 1);  // Pr[v > v_j]
  return d.value(j) - above * (d.value(j + 1) - d.value(j)) / d.prob(j);
}

std::vector<PricePoint> price_curves(const DiscreteDistribution& d) {
  std::vector<PricePoint> out;
  out.reserve(d.size() + 1);
  for (std::size_t j = 0; j < d.size(); ++j) {
    double p = d.value(j), u = 0.0, s = 0.0;
    for (std::size_t l = j; l < d.size(); ++l) {
      u += (d.value(l) - p) * d.prob(l);
      s += d.value(l) * d.prob(l);
    }
    out.push_back({p, u, s});
  }
  out.push_back({d.value(d.size() - 1) + 1.0, 0.0, 0.0});
  return out;
}

}  // namespace dmd
