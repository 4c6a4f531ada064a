#include "dmd/tree.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "dmd/errors.hpp"

namespace dmd {

HistoryTree HistoryTree::shape_of(std::vector<DiscreteDistribution> dists) {
  if (dists.empty()) throw std::invalid_argument("tree: no periods");
  HistoryTree t;
  t.dists = std::move(dists);
  std::size_t nodes = 1;
  for (const auto& d : t.dists) {
    if (nodes > 1000000 / d.size()) throw ResourceLimitError("tree: too many histories");
    nodes *= d.size();
    t.x.emplace_back(nodes, 0.0);
    t.p.emplace_back(nodes, 0.0);
  }
  return t;
}

double HistoryTree::path_prob(std::size_t level, std::size_t node) const {
  double pr = 1.0;
  for (std::size_t l = level + 1; l-- > 0;) {
    pr *= dists[l].prob(node % dists[l].size());
    node /= dists[l].size();
  }
  return pr;
}

HistoryTree adjusted_to_original(const HistoryTree& adjusted) {
  HistoryTree out = adjusted;
  const std::size_t k = out.levels();
  // Work upward so each level reads the still-adjusted child payments.
  for (std::size_t i = 0; i + 1 < k; ++i) {
    const DiscreteDistribution& next = out.dists[i + 1];
    for (std::size_t node = 0; node < out.nodes(i); ++node) {
      double future = 0.0;
      for (std::size_t a = 0; a < next.size(); ++a) {
        std::size_t ch = out.child(i, node, a);
        future += next.prob(a) * (next.value(a) * adjusted.x[i + 1][ch] - adjusted.p[i + 1][ch]);
      }
      out.p[i][node] = adjusted.p[i][node] + future;
    }
  }
  return out;
}

HistoryTree original_to_adjusted(const HistoryTree& original) {
  HistoryTree out = original;
  const std::size_t k = out.levels();
  // Level i needs already-adjusted children (the adjusted child payment
  // absorbs all deeper utilities), so convert from the bottom up.
  for (std::size_t i = k - 1; i-- > 0;) {
    const DiscreteDistribution& next = out.dists[i + 1];
    for (std::size_t node = 0; node < out.nodes(i); ++node) {
      double future = 0.0;
      for (std::size_t a = 0; a < next.size(); ++a) {
        std::size_t ch = out.child(i, node, a);
        future += next.prob(a) * (next.value(a) * out.x[i + 1][ch] - out.p[i + 1][ch]);
      }
      out.p[i][node] = original.p[i][node] - future;
    }
  }
  return out;
}

double tree_revenue(const HistoryTree& t) {
  double rev = 0.0;
  for (std::size_t i = 0; i < t.levels(); ++i)
    for (std::size_t node = 0; node < t.nodes(i); ++node)
      rev += t.path_prob(i, node) * t.p[i][node];
  return rev;
}

double tree_adjusted_objective(const HistoryTree& t) {
  double obj = 0.0;
  for (std::size_t node = 0; node < t.nodes(0); ++node)
    obj += t.path_prob(0, node) * t.p[0][node];
  for (std::size_t i = 1; i < t.levels(); ++i)
    for (std::size_t node = 0; node < t.nodes(i); ++node)
      obj += t.path_prob(i, node) * t.dists[i].value(t.value_index(i, node)) * t.x[i][node];
  return obj;
}

TreeVerifyReport verify_tree(const HistoryTree& t) {
  const std::size_t k = t.levels();
  // Truthful continuation utility of the subtree rooted at each node,
  // excluding the node's own stage utility.
  std::vector<std::vector<double>> cont(k);
  for (std::size_t i = k; i-- > 0;) {
    cont[i].assign(t.nodes(i), 0.0);
    if (i + 1 == k) continue;
    const DiscreteDistribution& next = t.dists[i + 1];
    for (std::size_t node = 0; node < t.nodes(i); ++node) {
      double v = 0.0;
      for (std::size_t a = 0; a < next.size(); ++a) {
        std::size_t ch = t.child(i, node, a);
        v += next.prob(a) *
             (next.value(a) * t.x[i + 1][ch] - t.p[i + 1][ch] + cont[i + 1][ch]);
      }
      cont[i][node] = v;
    }
  }

  TreeVerifyReport rep{0.0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < k; ++i) {
    const DiscreteDistribution& d = t.dists[i];
    for (std::size_t node = 0; node < t.nodes(i); ++node) {
      std::size_t a = t.value_index(i, node);
      double va = d.value(a);
      double stage = va * t.x[i][node] - t.p[i][node];
      rep.min_stage_utility = std::min(rep.min_stage_utility, stage);
      double truthful = stage + cont[i][node];
      std::size_t parent = node - a;  // first sibling
      for (std::size_t b = 0; b < d.size(); ++b) {
        if (b == a) continue;
        std::size_t alt = parent + b;
        double dev = va * t.x[i][alt] - t.p[i][alt] + cont[i][alt];
        rep.max_pic_violation = std::max(rep.max_pic_violation, dev - truthful);
      }
    }
  }
  return rep;
}

}  // namespace dmd
