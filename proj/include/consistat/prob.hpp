#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "consistat/graph.hpp"

namespace consistat {

enum class ProbKind { LatentFull, LatentRestricted, Empirical };

// Sparse probability distribution over unordered node pairs.  Cells sum to
// one; the node set may contain members with no probability mass.
class ProbMatrix {
 public:
  ProbMatrix(std::vector<NodeId> nodes, std::map<PairKey, double> probs,
             ProbKind kind)
      : nodes_(std::move(nodes)), probs_(std::move(probs)), kind_(kind) {
    std::sort(nodes_.begin(), nodes_.end());
    nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
    double sum = 0.0;
    for (auto it = probs_.begin(); it != probs_.end();) {
      if (it->second <= 0.0) { it = probs_.erase(it); continue; }
      if (it->first.first == it->first.second)
        throw std::invalid_argument("probability matrix has a diagonal cell");
      sum += it->second;
      ++it;
    }
    if (probs_.empty())
      throw std::invalid_argument("probability matrix has empty support");
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("probabilities do not sum to 1");
  }

  const std::vector<NodeId>& nodes() const { return nodes_; }
  const std::map<PairKey, double>& cells() const { return probs_; }
  ProbKind kind() const { return kind_; }

  std::size_t support_size() const { return probs_.size(); }
  double mean_nonzero() const {
    return 1.0 / static_cast<double>(probs_.size());
  }
  double prob(NodeId i, NodeId j) const {
    auto it = probs_.find(make_pair_key(i, j));
    return it == probs_.end() ? 0.0 : it->second;
  }

  std::map<NodeId, double> row_masses() const {
    std::map<NodeId, double> rows;
    for (NodeId n : nodes_) rows[n] = 0.0;
    for (const auto& [k, p] : probs_) {
      rows[k.first] += p;
      rows[k.second] += p;
    }
    return rows;
  }

 private:
  std::vector<NodeId> nodes_;
  std::map<PairKey, double> probs_;
  ProbKind kind_;
};

// P-hat: normalize observed weights by total weight.
inline ProbMatrix estimate_phat(const GraphSnapshot& g) {
  double total = g.total_weight();
  if (total <= 0.0)
    throw std::invalid_argument("cannot normalize a snapshot with zero weight");
  std::map<PairKey, double> probs;
  for (const auto& [k, w] : g.edges()) probs[k] = w / total;
  return ProbMatrix(g.nodes(), std::move(probs), ProbKind::Empirical);
}

// Keeps only pairs with both endpoints in v_sub and renormalizes by the
// surviving mass Z.
inline ProbMatrix restrict_and_renormalize(const ProbMatrix& p,
                                           const std::vector<NodeId>& v_sub) {
  std::vector<NodeId> keep(v_sub);
  std::sort(keep.begin(), keep.end());
  for (NodeId n : keep)
    if (!std::binary_search(p.nodes().begin(), p.nodes().end(), n))
      throw std::invalid_argument("restriction node not present in matrix");
  // dense membership table: node ids are small dense integers after
  // interning, so this beats per-cell binary search on big matrices
  std::vector<std::uint8_t> member(p.nodes().back() + 1, 0);
  for (NodeId n : keep) member[n] = 1;
  std::map<PairKey, double> cells;
  auto hint = cells.end();
  double z = 0.0;
  for (const auto& [k, v] : p.cells())
    if (member[k.first] && member[k.second]) {
      hint = cells.emplace_hint(hint, k, v);
      z += v;
    }
  if (cells.empty() || z <= 0.0)
    throw std::invalid_argument("no probability mass in restricted node set");
  for (auto& [k, v] : cells) v /= z;
  return ProbMatrix(std::move(keep), std::move(cells),
                    ProbKind::LatentRestricted);
}

}  // namespace consistat
