#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace consistat {

using NodeId = std::uint32_t;
using PairKey = std::pair<NodeId, NodeId>;  // always first < second

inline PairKey make_pair_key(NodeId a, NodeId b) {
  return a < b ? PairKey{a, b} : PairKey{b, a};
}

// Maps external string labels to dense NodeIds.  Interning is stable for
// the lifetime of one run; all snapshots of a dataset share one table.
class SymbolTable {
 public:
  NodeId intern(const std::string& label) {
    auto it = index_.find(label);
    if (it != index_.end()) return it->second;
    NodeId id = static_cast<NodeId>(labels_.size());
    labels_.push_back(label);
    index_.emplace(label, id);
    return id;
  }

  const std::string& label(NodeId id) const { return labels_.at(id); }
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> index_;
};

struct MessageRecord {
  NodeId src;
  NodeId dst;
  double timestamp;
};

// Sparse symmetric weighted graph for one time window.  Weights are kept
// once per unordered pair; raw snapshots hold integer counts, aggregates
// and prior-smoothed snapshots hold fractional weights.
class GraphSnapshot {
 public:
  GraphSnapshot() = default;
  GraphSnapshot(double t_start, double t_end)
      : t_start_(t_start), t_end_(t_end) {}

  void add_node(NodeId n) { nodes_.insert(n); }

  void add_weight(NodeId i, NodeId j, double w) {
    if (i == j) throw std::invalid_argument("self-loops are not representable");
    if (w < 0) throw std::invalid_argument("negative edge weight");
    if (w == 0) return;
    nodes_.insert(i);
    nodes_.insert(j);
    auto key = make_pair_key(i, j);
    auto [it, inserted] = weights_.try_emplace(key, w);
    if (!inserted) it->second += w;
    total_ += w;
  }

  double weight(NodeId i, NodeId j) const {
    if (i == j) return 0.0;
    auto it = weights_.find(make_pair_key(i, j));
    return it == weights_.end() ? 0.0 : it->second;
  }

  bool has_node(NodeId n) const { return nodes_.count(n) > 0; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t support_size() const { return weights_.size(); }
  double total_weight() const { return total_; }
  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  void set_window(double t0, double t1) { t_start_ = t0; t_end_ = t1; }

  std::vector<NodeId> nodes() const {
    return {nodes_.begin(), nodes_.end()};
  }
  const std::map<PairKey, double>& edges() const { return weights_; }

  // Weighted degree D_i = sum_j w_ij.
  std::map<NodeId, double> weighted_degrees() const {
    std::map<NodeId, double> d;
    for (NodeId n : nodes_) d[n] = 0.0;
    for (const auto& [k, w] : weights_) {
      d[k.first] += w;
      d[k.second] += w;
    }
    return d;
  }

 private:
  struct OrderedSet {
    std::vector<NodeId> v;  // sorted unique
    void insert(NodeId n) {
      auto it = std::lower_bound(v.begin(), v.end(), n);
      if (it == v.end() || *it != n) v.insert(it, n);
    }
    std::size_t count(NodeId n) const {
      auto it = std::lower_bound(v.begin(), v.end(), n);
      return it != v.end() && *it == n ? 1 : 0;
    }
    std::size_t size() const { return v.size(); }
    std::vector<NodeId>::const_iterator begin() const { return v.begin(); }
    std::vector<NodeId>::const_iterator end() const { return v.end(); }
  };

  OrderedSet nodes_;
  std::map<PairKey, double> weights_;
  double total_ = 0.0;
  double t_start_ = 0.0;
  double t_end_ = 0.0;
};

// Compact adjacency built once per snapshot for the statistics that walk
// neighborhoods.  Neighbor lists are sorted by NodeId.
struct Adjacency {
  std::vector<NodeId> nodes;                       // sorted
  std::unordered_map<NodeId, std::uint32_t> index; // node -> position
  std::vector<std::vector<std::pair<NodeId, double>>> neighbors;

  explicit Adjacency(const GraphSnapshot& g) {
    nodes = g.nodes();
    index.reserve(nodes.size());
    for (std::uint32_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = i;
    neighbors.resize(nodes.size());
    for (const auto& [k, w] : g.edges()) {
      neighbors[index.at(k.first)].emplace_back(k.second, w);
      neighbors[index.at(k.second)].emplace_back(k.first, w);
    }
    for (auto& nb : neighbors)
      std::sort(nb.begin(), nb.end());
  }

  std::size_t degree(std::uint32_t pos) const { return neighbors[pos].size(); }

  bool connected(NodeId a, NodeId b) const {
    auto it = index.find(a);
    if (it == index.end()) return false;
    const auto& nb = neighbors[it->second];
    auto lo = std::lower_bound(nb.begin(), nb.end(), b,
                               [](const auto& p, NodeId v) { return p.first < v; });
    return lo != nb.end() && lo->first == b;
  }
};

struct SnapshotBuildResult {
  std::vector<GraphSnapshot> snapshots;
  std::uint64_t self_loops_dropped = 0;
};

// Converts a message stream into fixed-width window snapshots.  Windows
// start at the minimum observed timestamp; with overlap_step d > 0 they
// start every d instead of every delta.  Windows are half-open
// [t_start, t_end).  Empty windows are materialized.
inline SnapshotBuildResult build_snapshots(std::vector<MessageRecord> messages,
                                           double delta,
                                           double overlap_step = 0.0) {
  if (delta <= 0) throw std::invalid_argument("delta must be positive");
  if (overlap_step < 0 || overlap_step > delta)
    throw std::invalid_argument("overlap step must lie in (0, delta]");
  SnapshotBuildResult out;
  std::uint64_t dropped = 0;
  messages.erase(std::remove_if(messages.begin(), messages.end(),
                                [&](const MessageRecord& m) {
                                  if (m.src == m.dst) { ++dropped; return true; }
                                  return false;
                                }),
                 messages.end());
  out.self_loops_dropped = dropped;
  if (messages.empty()) return out;
  std::sort(messages.begin(), messages.end(),
            [](const MessageRecord& a, const MessageRecord& b) {
              return a.timestamp < b.timestamp;
            });
  double step = overlap_step > 0 ? overlap_step : delta;
  double origin = messages.front().timestamp;
  double last = messages.back().timestamp;
  for (std::size_t k = 0;; ++k) {
    double t0 = origin + static_cast<double>(k) * step;
    // Overlapping mode emits every window start within the first delta even
    // when the stream ends early, so each message is covered by a full set
    // of shifted windows.
    if (!(t0 <= last || t0 < origin + delta - step * 0.5)) break;
    GraphSnapshot g(t0, t0 + delta);
    auto lo = std::lower_bound(messages.begin(), messages.end(), t0,
                               [](const MessageRecord& m, double t) {
                                 return m.timestamp < t;
                               });
    for (auto it = lo; it != messages.end() && it->timestamp < t0 + delta; ++it)
      g.add_weight(it->src, it->dst, 1.0);
    out.snapshots.push_back(std::move(g));
  }
  return out;
}

inline std::vector<NodeId> intersect_nodes(const GraphSnapshot& g1,
                                           const GraphSnapshot& g2) {
  std::vector<NodeId> a = g1.nodes(), b = g2.nodes(), out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

// Mean weighted matrix over a window of snapshots; node set is the union,
// missing pair weights count as zero.
inline GraphSnapshot aggregate_window(const std::vector<GraphSnapshot>& window) {
  if (window.empty())
    throw std::invalid_argument("cannot aggregate an empty window");
  GraphSnapshot out(window.front().t_start(), window.back().t_end());
  double k = static_cast<double>(window.size());
  for (const auto& g : window) {
    for (NodeId n : g.nodes()) out.add_node(n);
    for (const auto& [key, w] : g.edges())
      out.add_weight(key.first, key.second, w / k);
  }
  return out;
}

// Additive prior: every pair over the node set gains weight c.
inline GraphSnapshot apply_prior(const GraphSnapshot& g, double c) {
  if (c < 0) throw std::invalid_argument("prior weight must be non-negative");
  if (c == 0) return g;
  GraphSnapshot out(g.t_start(), g.t_end());
  auto ns = g.nodes();
  for (NodeId n : ns) out.add_node(n);
  for (std::size_t i = 0; i < ns.size(); ++i)
    for (std::size_t j = i + 1; j < ns.size(); ++j)
      out.add_weight(ns[i], ns[j], g.weight(ns[i], ns[j]) + c);
  return out;
}

// Snapshot restricted to pairs with both endpoints in v_sub; all of v_sub's
// members that existed in g stay in the node set (possibly isolated).
inline GraphSnapshot restrict_snapshot(const GraphSnapshot& g,
                                       const std::vector<NodeId>& v_sub) {
  GraphSnapshot out(g.t_start(), g.t_end());
  for (NodeId n : v_sub)
    if (g.has_node(n)) out.add_node(n);
  for (const auto& [key, w] : g.edges())
    if (out.has_node(key.first) && out.has_node(key.second))
      out.add_weight(key.first, key.second, w);
  return out;
}

}  // namespace consistat
