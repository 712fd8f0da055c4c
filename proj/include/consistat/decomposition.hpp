#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "consistat/graph.hpp"
#include "consistat/stats.hpp"

namespace consistat {

enum class ComponentKind { Edge, Node, Triplet };

// Canonical component identity: ids sorted ascending, unused slots zero.
struct Component {
  ComponentKind kind = ComponentKind::Edge;
  std::uint8_t arity = 2;
  std::array<NodeId, 3> ids{0, 0, 0};

  static Component edge(NodeId a, NodeId b) {
    auto k = make_pair_key(a, b);
    return {ComponentKind::Edge, 2, {k.first, k.second, 0}};
  }
  static Component node(NodeId a) { return {ComponentKind::Node, 1, {a, 0, 0}}; }
  static Component triplet(NodeId a, NodeId b, NodeId c) {
    std::array<NodeId, 3> v{a, b, c};
    std::sort(v.begin(), v.end());
    return {ComponentKind::Triplet, 3, v};
  }

  friend bool operator<(const Component& x, const Component& y) {
    if (x.kind != y.kind) return x.kind < y.kind;
    return x.ids < y.ids;
  }
  friend bool operator==(const Component& x, const Component& y) {
    return x.kind == y.kind && x.ids == y.ids;
  }
};

struct ContributionMap {
  StatId stat = StatId::MS;
  std::map<Component, double> entries;
  double total = 0.0;
};

struct AnomalySubgraph {
  std::vector<std::pair<Component, double>> selected;  // descending score
  std::vector<std::pair<PairKey, double>> context_edges;
  std::vector<NodeId> context_nodes;
  double coverage = 0.0;  // selected mass / coverage target
};

namespace detail {

inline void add_entry(ContributionMap& cm, const Component& c, double score) {
  if (score == 0.0) return;
  cm.entries[c] += score;
  cm.total += score;
}

inline ContributionMap decompose_ms(const GraphSnapshot& g1,
                                    const GraphSnapshot& g2) {
  ContributionMap cm;
  cm.stat = StatId::MS;
  auto rp = restrict_to_intersection(g1, g2);
  double w1 = rp.r1.total_weight(), w2 = rp.r2.total_weight();
  double a1 = static_cast<double>(rp.r1.support_size());
  double a2 = static_cast<double>(rp.r2.support_size());
  double z = choose2(rp.v_cap.size());
  auto it1 = rp.r1.edges().begin(), e1 = rp.r1.edges().end();
  auto it2 = rp.r2.edges().begin(), e2 = rp.r2.edges().end();
  while (it1 != e1 || it2 != e2) {
    PairKey key;
    double wx1 = 0.0, wx2 = 0.0;
    if (it2 == e2 || (it1 != e1 && it1->first < it2->first)) {
      key = it1->first; wx1 = it1->second; ++it1;
    } else if (it1 == e1 || it2->first < it1->first) {
      key = it2->first; wx2 = it2->second; ++it2;
    } else {
      key = it1->first; wx1 = it1->second; wx2 = it2->second; ++it1; ++it2;
    }
    double d = a1 * wx1 / w1 - a2 * wx2 / w2;
    add_entry(cm, Component::edge(key.first, key.second), d * d / z);
  }
  return cm;
}

inline ContributionMap decompose_ged(const GraphSnapshot& g1,
                                     const GraphSnapshot& g2) {
  ContributionMap cm;
  cm.stat = StatId::GED;
  std::vector<NodeId> n1 = g1.nodes(), n2 = g2.nodes(), sym;
  std::set_symmetric_difference(n1.begin(), n1.end(), n2.begin(), n2.end(),
                                std::back_inserter(sym));
  for (NodeId n : sym) add_entry(cm, Component::node(n), 1.0);
  auto it1 = g1.edges().begin(), e1 = g1.edges().end();
  auto it2 = g2.edges().begin(), e2 = g2.edges().end();
  while (it1 != e1 || it2 != e2) {
    PairKey key;
    double d;
    if (it2 == e2 || (it1 != e1 && it1->first < it2->first)) {
      key = it1->first; d = std::abs(it1->second); ++it1;
    } else if (it1 == e1 || it2->first < it1->first) {
      key = it2->first; d = std::abs(it2->second); ++it2;
    } else {
      key = it1->first; d = std::abs(it1->second - it2->second); ++it1; ++it2;
    }
    add_entry(cm, Component::edge(key.first, key.second), d);
  }
  return cm;
}

inline ContributionMap decompose_tp(const GraphSnapshot& g) {
  if (g.node_count() < 3)
    throw std::invalid_argument("triangle probability needs >= 3 nodes");
  double total = g.total_weight();
  if (total <= 0) throw std::invalid_argument("snapshot has zero weight");
  ContributionMap cm;
  cm.stat = StatId::TP;
  Adjacency adj(g);
  double a = static_cast<double>(g.support_size());
  double scale = a * a * a / (total * total * total * choose3(g.node_count()));
  for_each_triangle(adj, [&](NodeId i, NodeId j, NodeId k, double wij,
                             double wik, double wjk) {
    add_entry(cm, Component::triplet(i, j, k), scale * wij * wik * wjk);
  });
  return cm;
}

inline ContributionMap decompose_barrat(const GraphSnapshot& g) {
  ContributionMap cm;
  cm.stat = StatId::CB;
  if (g.node_count() == 0) return cm;
  Adjacency adj(g);
  std::vector<double> inner(adj.nodes.size(), 0.0);
  for_each_triangle(adj, [&](NodeId i, NodeId j, NodeId k, double wij,
                             double wik, double wjk) {
    inner[adj.index.at(i)] += wij + wik;
    inner[adj.index.at(j)] += wij + wjk;
    inner[adj.index.at(k)] += wik + wjk;
  });
  double nv = static_cast<double>(g.node_count());
  for (std::uint32_t p = 0; p < adj.nodes.size(); ++p) {
    std::size_t k = adj.degree(p);
    if (k < 2) continue;
    double di = 0.0;
    for (const auto& [n, w] : adj.neighbors[p]) di += w;
    if (di <= 0) continue;
    add_entry(cm, Component::node(adj.nodes[p]),
              inner[p] / (nv * static_cast<double>(k - 1) * di));
  }
  return cm;
}

}  // namespace detail

// Per-component attribution of the UNCORRECTED statistic value.  Bias
// corrections are global adjustments with no per-component identity, so
// totals reconcile with the uncorrected forms.
inline ContributionMap decompose(StatId stat, const GraphSnapshot& g1,
                                 const GraphSnapshot& g2) {
  switch (stat) {
    case StatId::MS:
      return detail::decompose_ms(g1, g2);
    case StatId::GED:
      return detail::decompose_ged(g1, g2);
    default:
      throw std::invalid_argument("statistic is not decomposable as a delta");
  }
}

inline ContributionMap decompose(StatId stat, const GraphSnapshot& g) {
  switch (stat) {
    case StatId::TP:
      return detail::decompose_tp(g);
    case StatId::CB:
      return detail::decompose_barrat(g);
    default:
      throw std::invalid_argument(
          "statistic is not decomposable as a single-graph statistic");
  }
}

enum class CoverageScale { Linear, Log };

namespace detail {

inline AnomalySubgraph subgraph_in(
    const std::vector<std::pair<Component, double>>& selected,
    const GraphSnapshot& g, double coverage) {
  AnomalySubgraph out;
  out.selected = selected;
  out.coverage = coverage;
  std::vector<NodeId> members;
  for (const auto& [c, score] : selected)
    for (std::uint8_t i = 0; i < c.arity; ++i) members.push_back(c.ids[i]);
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  auto is_member = [&](NodeId n) {
    return std::binary_search(members.begin(), members.end(), n);
  };
  // one-hop context: edges incident to any selected component's endpoints
  std::vector<NodeId> ctx;
  for (const auto& [k, w] : g.edges()) {
    if (is_member(k.first) || is_member(k.second)) {
      out.context_edges.emplace_back(k, w);
      if (!is_member(k.first)) ctx.push_back(k.first);
      if (!is_member(k.second)) ctx.push_back(k.second);
    }
  }
  std::sort(ctx.begin(), ctx.end());
  ctx.erase(std::unique(ctx.begin(), ctx.end()), ctx.end());
  out.context_nodes = std::move(ctx);
  return out;
}

}  // namespace detail

// Greedy prefix of the descending-sorted component list covering the
// requested fraction of the anomaly score, returned in both the before and
// during snapshots with one-hop adjacent context.
inline std::pair<AnomalySubgraph, AnomalySubgraph> extract_subgraph(
    const ContributionMap& contrib, const GraphSnapshot& g_before,
    const GraphSnapshot& g_during, double target_fraction = 0.2,
    CoverageScale scale = CoverageScale::Linear) {
  if (contrib.total <= 0)
    throw std::invalid_argument("nothing to explain: zero total contribution");
  if (target_fraction <= 0 || target_fraction > 1)
    throw std::invalid_argument("target fraction must lie in (0,1]");
  std::vector<std::pair<Component, double>> order(contrib.entries.begin(),
                                                  contrib.entries.end());
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& x, const auto& y) {
                     if (x.second != y.second) return x.second > y.second;
                     return x.first < y.first;  // canonical tie-break
                   });
  double target = scale == CoverageScale::Linear
                      ? target_fraction * contrib.total
                      : target_fraction * std::log1p(contrib.total);
  std::vector<std::pair<Component, double>> selected;
  double cum = 0.0;
  for (const auto& e : order) {
    double reached = scale == CoverageScale::Linear ? cum : std::log1p(cum);
    if (reached >= target && !selected.empty()) break;
    selected.push_back(e);
    cum += e.second;
  }
  double reached = scale == CoverageScale::Linear ? cum : std::log1p(cum);
  double coverage = target > 0 ? reached / target : 1.0;
  return {detail::subgraph_in(selected, g_before, coverage),
          detail::subgraph_in(selected, g_during, coverage)};
}

}  // namespace consistat
