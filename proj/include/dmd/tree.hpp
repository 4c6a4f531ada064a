#pragma once

#include <cstddef>
#include <vector>

#include "dmd/dist.hpp"

namespace dmd {

// Complete history tree for k periods. Level i (0-based) holds one node per
// value prefix (v_1..v_{i+1}); node ids use mixed radix: id = parent * s_i + a
// where a indexes period-(i+1)'s support. Each node stores an allocation and a
// payment (adjusted or original depending on context).
struct HistoryTree {
  std::vector<DiscreteDistribution> dists;
  std::vector<std::vector<double>> x;  // x[level][node]
  std::vector<std::vector<double>> p;  // p[level][node]

  static HistoryTree shape_of(std::vector<DiscreteDistribution> dists);

  std::size_t levels() const { return dists.size(); }
  std::size_t nodes(std::size_t level) const { return x[level].size(); }
  std::size_t parent(std::size_t level, std::size_t node) const {
    return node / dists[level].size();
  }
  std::size_t value_index(std::size_t level, std::size_t node) const {
    return node % dists[level].size();
  }
  std::size_t child(std::size_t level, std::size_t node, std::size_t a) const {
    return node * dists[level + 1].size() + a;
  }
  // Product of probabilities along the path to this node.
  double path_prob(std::size_t level, std::size_t node) const;
};

// Adjusted payments -> original payments:
//   p_i = p_hat_i + E_{v_{i+1}}[v_{i+1} x_{i+1} - p_hat_{i+1}], last level unchanged.
HistoryTree adjusted_to_original(const HistoryTree& adjusted);

// Original payments -> adjusted payments (inverse of the above).
HistoryTree original_to_adjusted(const HistoryTree& original);

// Expected sum of payments, weighting nodes by path probability.
double tree_revenue(const HistoryTree& t);

// Adjusted objective: E[p_1(v_1)] + sum_{i >= 2} E[v_i x_i], reading p at
// level 0 as the adjusted payment.
double tree_adjusted_objective(const HistoryTree& t);

struct TreeVerifyReport {
  double max_pic_violation;
  double min_stage_utility;
};

// Brute-force single-deviation check on a tree with original payments:
// at every node, truthful play must beat reporting any sibling (stage utility
// plus truthful continuation in the sibling's subtree).
TreeVerifyReport verify_tree(const HistoryTree& original);

}  // namespace dmd
