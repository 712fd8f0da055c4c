#pragma once

#include <map>
#include <vector>

#include "consistat/consistat.hpp"

namespace testutil {

using namespace consistat;

struct Edge {
  NodeId a, b;
  double w;
};

inline GraphSnapshot make_graph(const std::vector<NodeId>& nodes,
                                const std::vector<Edge>& edges) {
  GraphSnapshot g;
  for (NodeId n : nodes) g.add_node(n);
  for (const auto& e : edges) g.add_weight(e.a, e.b, e.w);
  return g;
}

// Random small graph for property tests: up to max_nodes nodes, random
// integer weights.
inline GraphSnapshot random_graph(Rng& rng, std::uint32_t max_nodes = 12,
                                  double edge_prob = 0.4) {
  std::uint32_t n = 3 + static_cast<std::uint32_t>(rng.below(max_nodes - 2));
  GraphSnapshot g;
  for (NodeId i = 0; i < n; ++i) g.add_node(i);
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      if (rng.bernoulli(edge_prob))
        g.add_weight(i, j, 1.0 + static_cast<double>(rng.below(5)));
  return g;
}

// Applies a node-id mapping; ids must be mapped injectively.
inline GraphSnapshot relabel(const GraphSnapshot& g,
                             const std::map<NodeId, NodeId>& mapping) {
  GraphSnapshot out(g.t_start(), g.t_end());
  for (NodeId n : g.nodes()) out.add_node(mapping.at(n));
  for (const auto& [k, w] : g.edges())
    out.add_weight(mapping.at(k.first), mapping.at(k.second), w);
  return out;
}

// A permutation of the graph's own node set (relabeling that keeps V).
inline std::map<NodeId, NodeId> shuffle_within(const GraphSnapshot& g,
                                               Rng& rng) {
  auto nodes = g.nodes();
  auto shuffled = nodes;
  for (std::size_t i = shuffled.size(); i > 1; --i)
    std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
  std::map<NodeId, NodeId> m;
  for (std::size_t i = 0; i < nodes.size(); ++i) m[nodes[i]] = shuffled[i];
  return m;
}

inline GraphSnapshot scale_weights(const GraphSnapshot& g, double c) {
  GraphSnapshot out(g.t_start(), g.t_end());
  for (NodeId n : g.nodes()) out.add_node(n);
  for (const auto& [k, w] : g.edges()) out.add_weight(k.first, k.second, w * c);
  return out;
}

}  // namespace testutil
