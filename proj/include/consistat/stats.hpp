#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "consistat/graph.hpp"
#include "consistat/prob.hpp"
#include "consistat/rng.hpp"

namespace consistat {

enum class StatId { GED, DD, CB, DELTACON, NETSIMILE, MS, PDD, TP };
enum class Arity { Single, Delta };

struct StatisticValue {
  double value;
  StatId id;
  Arity arity;
};

inline const char* to_string(StatId id) {
  switch (id) {
    case StatId::GED: return "ged";
    case StatId::DD: return "dd";
    case StatId::CB: return "barrat";
    case StatId::DELTACON: return "deltacon";
    case StatId::NETSIMILE: return "netsimile";
    case StatId::MS: return "ms";
    case StatId::PDD: return "pdd";
    case StatId::TP: return "tp";
  }
  return "?";
}

inline StatId stat_id_from_string(const std::string& s) {
  if (s == "ged") return StatId::GED;
  if (s == "dd") return StatId::DD;
  if (s == "barrat") return StatId::CB;
  if (s == "deltacon") return StatId::DELTACON;
  if (s == "netsimile") return StatId::NETSIMILE;
  if (s == "ms") return StatId::MS;
  if (s == "pdd") return StatId::PDD;
  if (s == "tp") return StatId::TP;
  throw std::invalid_argument("unknown statistic id: " + s);
}

inline bool is_delta_stat(StatId id) {
  return id != StatId::CB && id != StatId::TP;
}

// Equal-width consecutive bins covering [lo, hi]; values at hi clamp into
// the last bin.
struct BinSpec {
  std::uint32_t bin_count;
  double lo;
  double hi;

  BinSpec(std::uint32_t count, double lo_, double hi_)
      : bin_count(count), lo(lo_), hi(hi_) {
    if (bin_count == 0 || !(lo < hi))
      throw std::invalid_argument("bad bin specification");
  }

  double width() const { return (hi - lo) / bin_count; }

  std::uint32_t index(double x) const {
    if (x < lo || x > hi)
      throw std::invalid_argument("value outside bin range");
    auto idx = static_cast<std::uint32_t>((x - lo) / width());
    return idx >= bin_count ? bin_count - 1 : idx;
  }
};

inline BinSpec default_dd_bins(const GraphSnapshot& g1,
                               const GraphSnapshot& g2) {
  double hi = 0.0;
  for (const auto* g : {&g1, &g2})
    for (const auto& [n, d] : g->weighted_degrees()) hi = std::max(hi, d);
  return BinSpec(50, 0.0, hi > 0 ? hi : 1.0);
}

inline BinSpec default_pdd_bins(const GraphSnapshot& g1,
                                const GraphSnapshot& g2) {
  double hi = static_cast<double>(std::max(g1.node_count(), g2.node_count()));
  return BinSpec(50, 0.0, hi > 0 ? hi : 1.0);
}

namespace detail {

inline double choose2(std::size_t n) {
  return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
}

inline double choose3(std::size_t n) {
  return static_cast<double>(n) * static_cast<double>(n - 1) *
         static_cast<double>(n - 2) / 6.0;
}

// Enumerates each triangle exactly once, in lexicographic (i, j, k) node-id
// order, via forward adjacency and sorted-list intersection.  The visit
// order is part of the contract: it matches a brute-force i<j<k scan so
// floating-point sums agree bit-for-bit with an exhaustive oracle.
template <typename Fn>
void for_each_triangle(const Adjacency& adj, Fn&& fn) {
  const auto& nodes = adj.nodes;
  for (std::uint32_t pi = 0; pi < nodes.size(); ++pi) {
    NodeId i = nodes[pi];
    const auto& ni = adj.neighbors[pi];
    auto i_fwd = std::lower_bound(ni.begin(), ni.end(), i,
                                  [](const auto& p, NodeId v) { return p.first <= v; });
    for (auto jt = i_fwd; jt != ni.end(); ++jt) {
      NodeId j = jt->first;
      double wij = jt->second;
      const auto& nj = adj.neighbors[adj.index.at(j)];
      // walk the tails of N(i) and N(j) beyond j in lockstep
      auto a = jt + 1;
      auto b = std::lower_bound(nj.begin(), nj.end(), j,
                                [](const auto& p, NodeId v) { return p.first <= v; });
      while (a != ni.end() && b != nj.end()) {
        if (a->first < b->first) ++a;
        else if (b->first < a->first) ++b;
        else {
          fn(i, j, a->first, wij, a->second, b->second);
          ++a;
          ++b;
        }
      }
    }
  }
}

struct Moments {
  double mean, median, stddev, skewness, kurtosis;
};

inline Moments moments(std::vector<double> v) {
  Moments m{0, 0, 0, 0, 0};
  if (v.empty()) return m;
  double n = static_cast<double>(v.size());
  for (double x : v) m.mean += x;
  m.mean /= n;
  std::sort(v.begin(), v.end());
  std::size_t h = v.size() / 2;
  m.median = v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
  double m2 = 0, m3 = 0, m4 = 0;
  for (double x : v) {
    double d = x - m.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.stddev = std::sqrt(m2);
  if (m.stddev > 1e-12) {
    m.skewness = m3 / (m.stddev * m.stddev * m.stddev);
    m.kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return m;
}

// Shared MS/PDD preparation: both delta statistics compare like with like
// on the node intersection.
struct RestrictedPair {
  std::vector<NodeId> v_cap;
  GraphSnapshot r1, r2;
};

inline RestrictedPair restrict_to_intersection(const GraphSnapshot& g1,
                                               const GraphSnapshot& g2) {
  RestrictedPair rp;
  rp.v_cap = intersect_nodes(g1, g2);
  if (rp.v_cap.empty())
    throw std::invalid_argument("node intersection is empty");
  rp.r1 = restrict_snapshot(g1, rp.v_cap);
  rp.r2 = restrict_snapshot(g2, rp.v_cap);
  if (rp.r1.total_weight() <= 0 || rp.r2.total_weight() <= 0)
    throw std::invalid_argument("no weight within the node intersection");
  return rp;
}

// Squared difference of binned fractions with optional sampling-bias
// correction.  n1/n2 are the population sizes the fractions came from.
// literal_denoms reproduces the printed form that divides both correction
// terms by n2.
inline double binned_fraction_diff(const std::vector<double>& values1,
                                   std::size_t n1,
                                   const std::vector<double>& values2,
                                   std::size_t n2, const BinSpec& bins,
                                   bool corrected,
                                   bool literal_denoms = false) {
  std::vector<double> f1(bins.bin_count, 0.0), f2(bins.bin_count, 0.0);
  for (double x : values1) f1[bins.index(x)] += 1.0 / static_cast<double>(n1);
  for (double x : values2) f2[bins.index(x)] += 1.0 / static_cast<double>(n2);
  double sum = 0.0;
  for (std::uint32_t k = 0; k < bins.bin_count; ++k) {
    double d = f1[k] - f2[k];
    sum += d * d;
    if (corrected) {
      double d1 = static_cast<double>(literal_denoms ? n2 : n1);
      double d2 = static_cast<double>(n2);
      sum -= f1[k] * (1.0 - f1[k]) / d1 + f2[k] * (1.0 - f2[k]) / d2;
    }
  }
  return sum;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Conventional statistics
// ---------------------------------------------------------------------------

// Weighted graph edit distance: node-set terms plus summed weight deltas.
inline StatisticValue ged(const GraphSnapshot& g1, const GraphSnapshot& g2) {
  double v = static_cast<double>(g1.node_count()) +
             static_cast<double>(g2.node_count()) -
             2.0 * static_cast<double>(intersect_nodes(g1, g2).size());
  auto it1 = g1.edges().begin(), e1 = g1.edges().end();
  auto it2 = g2.edges().begin(), e2 = g2.edges().end();
  while (it1 != e1 || it2 != e2) {
    if (it2 == e2 || (it1 != e1 && it1->first < it2->first)) {
      v += std::abs(it1->second);
      ++it1;
    } else if (it1 == e1 || it2->first < it1->first) {
      v += std::abs(it2->second);
      ++it2;
    } else {
      v += std::abs(it1->second - it2->second);
      ++it1;
      ++it2;
    }
  }
  return {v, StatId::GED, Arity::Delta};
}

// Squared difference of raw binned weighted-degree counts.
inline StatisticValue degree_dist_diff(const GraphSnapshot& g1,
                                       const GraphSnapshot& g2,
                                       const BinSpec& bins) {
  std::vector<double> c1(bins.bin_count, 0.0), c2(bins.bin_count, 0.0);
  for (const auto& [n, d] : g1.weighted_degrees()) c1[bins.index(d)] += 1.0;
  for (const auto& [n, d] : g2.weighted_degrees()) c2[bins.index(d)] += 1.0;
  double sum = 0.0;
  for (std::uint32_t k = 0; k < bins.bin_count; ++k) {
    double d = c1[k] - c2[k];
    sum += d * d;
  }
  return {sum, StatId::DD, Arity::Delta};
}

// Barrat weighted clustering coefficient.  The inner sum runs over ordered
// neighbor pairs, so on binary weights CB reduces to the mean unweighted
// clustering coefficient.  Nodes with fewer than two neighbors contribute 0
// but still count in the 1/|V| factor.
inline StatisticValue barrat_clustering(const GraphSnapshot& g) {
  if (g.node_count() == 0) return {0.0, StatId::CB, Arity::Single};
  Adjacency adj(g);
  std::vector<double> inner(adj.nodes.size(), 0.0);
  detail::for_each_triangle(adj, [&](NodeId i, NodeId j, NodeId k, double wij,
                                     double wik, double wjk) {
    inner[adj.index.at(i)] += wij + wik;
    inner[adj.index.at(j)] += wij + wjk;
    inner[adj.index.at(k)] += wik + wjk;
  });
  double nv = static_cast<double>(g.node_count());
  double cb = 0.0;
  for (std::uint32_t p = 0; p < adj.nodes.size(); ++p) {
    std::size_t k = adj.degree(p);
    if (k < 2) continue;
    double di = 0.0;
    for (const auto& [n, w] : adj.neighbors[p]) di += w;
    if (di <= 0) continue;
    cb += inner[p] / (nv * static_cast<double>(k - 1) * di);
  }
  return {cb, StatId::CB, Arity::Single};
}

// Deltacon distance via the quadratic fast-belief-propagation expansion
// S = I + eps*A + eps^2*A^2 of each binary adjacency over the union node
// set, compared with the root-euclidean (Matusita) distance.
inline StatisticValue deltacon_distance(const GraphSnapshot& g1,
                                        const GraphSnapshot& g2,
                                        double epsilon = 0.0) {
  if (epsilon < 0) throw std::invalid_argument("epsilon must be non-negative");
  std::vector<NodeId> a = g1.nodes(), b = g2.nodes(), uni;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(uni));
  Adjacency adj1(g1), adj2(g2);
  if (epsilon == 0.0) {
    std::size_t maxdeg = 0;
    for (const auto& nb : adj1.neighbors) maxdeg = std::max(maxdeg, nb.size());
    for (const auto& nb : adj2.neighbors) maxdeg = std::max(maxdeg, nb.size());
    epsilon = 1.0 / (1.0 + static_cast<double>(maxdeg));
  }
  auto affinity = [&](const Adjacency& adj) {
    std::unordered_map<NodeId, std::unordered_map<NodeId, double>> s;
    double e2 = epsilon * epsilon;
    for (NodeId n : uni) s[n][n] = 1.0;
    for (std::uint32_t p = 0; p < adj.nodes.size(); ++p) {
      NodeId i = adj.nodes[p];
      const auto& nb = adj.neighbors[p];
      s[i][i] += e2 * static_cast<double>(nb.size());
      for (const auto& [j, w] : nb) {
        s[i][j] += epsilon;
        // two-step paths i -> j -> k
        for (const auto& [k, w2] : adj.neighbors[adj.index.at(j)])
          if (k != i) s[i][k] += e2;
      }
    }
    return s;
  };
  auto s1 = affinity(adj1), s2 = affinity(adj2);
  double sum = 0.0;
  for (NodeId i : uni) {
    const auto& r1 = s1[i];
    const auto& r2 = s2[i];
    for (const auto& [j, v] : r1) {
      auto it = r2.find(j);
      double u = it == r2.end() ? 0.0 : it->second;
      double d = std::sqrt(v) - std::sqrt(u);
      sum += d * d;
    }
    for (const auto& [j, u] : r2)
      if (!r1.count(j)) {
        double d = std::sqrt(u);
        sum += d * d;
      }
  }
  return {std::sqrt(sum), StatId::DELTACON, Arity::Delta};
}

// Per-node structural features used by the Netsimile-style signature.
struct NetsimileFeatures {
  double degree;
  double clustering;
  double two_hop_size;
  double mean_neighbor_clustering;
  double egonet_edges;
  double egonet_out_edges;
  double egonet_neighbors;
};

inline std::vector<NetsimileFeatures> netsimile_features(
    const GraphSnapshot& g) {
  Adjacency adj(g);
  std::size_t n = adj.nodes.size();
  std::vector<double> tri(n, 0.0);
  detail::for_each_triangle(adj, [&](NodeId i, NodeId j, NodeId k, double,
                                     double, double) {
    tri[adj.index.at(i)] += 1.0;
    tri[adj.index.at(j)] += 1.0;
    tri[adj.index.at(k)] += 1.0;
  });
  std::vector<double> clustering(n, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    double k = static_cast<double>(adj.degree(p));
    if (k >= 2) clustering[p] = 2.0 * tri[p] / (k * (k - 1.0));
  }
  // position-indexed neighbor lists keep the inner loops hash-free
  std::vector<std::vector<std::uint32_t>> nbp(n);
  for (std::size_t p = 0; p < n; ++p) {
    nbp[p].reserve(adj.neighbors[p].size());
    for (const auto& [j, w] : adj.neighbors[p])
      nbp[p].push_back(adj.index.at(j));
  }
  std::vector<NetsimileFeatures> out(n);
  std::vector<std::uint8_t> mark(n, 0);
  std::vector<std::uint32_t> touched;
  for (std::size_t p = 0; p < n; ++p) {
    auto& f = out[p];
    const auto& nb = nbp[p];
    f.degree = static_cast<double>(nb.size());
    f.clustering = clustering[p];
    f.egonet_edges = f.degree + tri[p];
    double ncl = 0.0;
    for (auto pj : nb) ncl += clustering[pj];
    f.mean_neighbor_clustering = nb.empty() ? 0.0 : ncl / f.degree;

    // two-hop reach and egonet boundary in one pass
    touched.clear();
    mark[p] = 1;  // ego center
    touched.push_back(static_cast<std::uint32_t>(p));
    for (auto pj : nb) {
      if (!mark[pj]) { mark[pj] = 2; touched.push_back(pj); }  // ego member
    }
    std::size_t two_hop = nb.size();
    for (auto pj : nb) {
      for (auto pk : nbp[pj]) {
        if (!mark[pk]) {
          mark[pk] = 3;  // outside egonet, adjacent to it
          touched.push_back(pk);
          ++two_hop;
        }
      }
    }
    f.two_hop_size = static_cast<double>(two_hop);
    double out_edges = 0.0, out_nodes = 0.0;
    for (std::uint32_t t : touched) {
      if (mark[t] == 3) {
        ++out_nodes;
      } else {  // ego member: count edges leaving the egonet
        for (auto pk : nbp[t])
          if (mark[pk] == 3 || !mark[pk]) ++out_edges;
      }
    }
    f.egonet_out_edges = out_edges;
    f.egonet_neighbors = out_nodes;
    for (std::uint32_t t : touched) mark[t] = 0;
  }
  return out;
}

// 35-dimensional signature: five aggregates of each of the seven features.
inline std::vector<double> netsimile_signature(const GraphSnapshot& g) {
  if (g.node_count() == 0)
    throw std::invalid_argument("netsimile requires a nonempty snapshot");
  auto feats = netsimile_features(g);
  std::vector<double> sig;
  sig.reserve(35);
  auto push = [&](auto accessor) {
    std::vector<double> col;
    col.reserve(feats.size());
    for (const auto& f : feats) col.push_back(accessor(f));
    auto m = detail::moments(std::move(col));
    sig.push_back(m.mean);
    sig.push_back(m.median);
    sig.push_back(m.stddev);
    sig.push_back(m.skewness);
    sig.push_back(m.kurtosis);
  };
  push([](const NetsimileFeatures& f) { return f.degree; });
  push([](const NetsimileFeatures& f) { return f.clustering; });
  push([](const NetsimileFeatures& f) { return f.two_hop_size; });
  push([](const NetsimileFeatures& f) { return f.mean_neighbor_clustering; });
  push([](const NetsimileFeatures& f) { return f.egonet_edges; });
  push([](const NetsimileFeatures& f) { return f.egonet_out_edges; });
  push([](const NetsimileFeatures& f) { return f.egonet_neighbors; });
  return sig;
}

inline double canberra_distance(const std::vector<double>& x,
                                const std::vector<double>& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("signature length mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double denom = std::abs(x[i]) + std::abs(y[i]);
    if (denom > 0) d += std::abs(x[i] - y[i]) / denom;
  }
  return d;
}

inline StatisticValue netsimile_distance(const GraphSnapshot& g1,
                                         const GraphSnapshot& g2) {
  return {canberra_distance(netsimile_signature(g1), netsimile_signature(g2)),
          StatId::NETSIMILE, Arity::Delta};
}

// ---------------------------------------------------------------------------
// Size-consistent statistics
// ---------------------------------------------------------------------------

// Probability Mass Shift.  Both snapshots are restricted to the node
// intersection; each cell is scaled by its graph's support size (the
// inverse mean nonzero cell) before differencing.  The corrected form
// subtracts the multinomial sampling bias estimate per cell.
inline StatisticValue mass_shift(const GraphSnapshot& g1,
                                 const GraphSnapshot& g2,
                                 bool corrected = true) {
  auto rp = detail::restrict_to_intersection(g1, g2);
  if (rp.v_cap.size() < 2)
    throw std::invalid_argument("mass shift needs at least two common nodes");
  double w1 = rp.r1.total_weight(), w2 = rp.r2.total_weight();
  double a1 = static_cast<double>(rp.r1.support_size());
  double a2 = static_cast<double>(rp.r2.support_size());
  auto it1 = rp.r1.edges().begin(), e1 = rp.r1.edges().end();
  auto it2 = rp.r2.edges().begin(), e2 = rp.r2.edges().end();
  double sum = 0.0;
  auto cell = [&](double wx1, double wx2) {
    double p1 = wx1 / w1, p2 = wx2 / w2;
    double d = a1 * p1 - a2 * p2;
    double v = d * d;
    if (corrected)
      v -= a1 * a1 * p1 * (1.0 - p1) / w1 + a2 * a2 * p2 * (1.0 - p2) / w2;
    return v;
  };
  while (it1 != e1 || it2 != e2) {
    if (it2 == e2 || (it1 != e1 && it1->first < it2->first)) {
      sum += cell(it1->second, 0.0);
      ++it1;
    } else if (it1 == e1 || it2->first < it1->first) {
      sum += cell(0.0, it2->second);
      ++it2;
    } else {
      sum += cell(it1->second, it2->second);
      ++it1;
      ++it2;
    }
  }
  return {sum / detail::choose2(rp.v_cap.size()), StatId::MS, Arity::Delta};
}

// Latent mass shift over a shared node set; oracle for convergence tests.
inline StatisticValue mass_shift_latent(const ProbMatrix& p1,
                                        const ProbMatrix& p2) {
  if (p1.nodes() != p2.nodes())
    throw std::invalid_argument("latent mass shift requires equal node sets");
  double a1 = static_cast<double>(p1.support_size());
  double a2 = static_cast<double>(p2.support_size());
  auto it1 = p1.cells().begin(), e1 = p1.cells().end();
  auto it2 = p2.cells().begin(), e2 = p2.cells().end();
  double sum = 0.0;
  while (it1 != e1 || it2 != e2) {
    double v1 = 0.0, v2 = 0.0;
    if (it2 == e2 || (it1 != e1 && it1->first < it2->first)) {
      v1 = it1->second; ++it1;
    } else if (it1 == e1 || it2->first < it1->first) {
      v2 = it2->second; ++it2;
    } else {
      v1 = it1->second; v2 = it2->second; ++it1; ++it2;
    }
    double d = a1 * v1 - a2 * v2;
    sum += d * d;
  }
  return {sum / detail::choose2(p1.nodes().size()), StatId::MS, Arity::Delta};
}

// Empirical probabilistic degree of node i: |V| times its row mass share.
inline double probabilistic_degree(const GraphSnapshot& g, NodeId i) {
  if (!g.has_node(i)) throw std::invalid_argument("node absent from snapshot");
  double total = g.total_weight();
  if (total <= 0) throw std::invalid_argument("snapshot has zero weight");
  auto degs = g.weighted_degrees();
  return static_cast<double>(g.node_count()) * degs.at(i) / total;
}

namespace detail {

inline std::vector<double> probabilistic_degrees(const GraphSnapshot& g) {
  double total = g.total_weight();
  double nv = static_cast<double>(g.node_count());
  std::vector<double> out;
  out.reserve(g.node_count());
  for (const auto& [n, d] : g.weighted_degrees()) out.push_back(nv * d / total);
  return out;
}

}  // namespace detail

// Probabilistic Degree Distance.  Fractions are computed on the node
// intersection for both graphs so the delta compares like with like.
inline StatisticValue pdd(const GraphSnapshot& g1, const GraphSnapshot& g2,
                          const BinSpec& bins, bool corrected = true,
                          bool literal_denoms = false) {
  if (g1.node_count() == 0 || g2.node_count() == 0)
    throw std::invalid_argument("pdd requires nonempty snapshots");
  auto rp = detail::restrict_to_intersection(g1, g2);
  auto pd1 = detail::probabilistic_degrees(rp.r1);
  auto pd2 = detail::probabilistic_degrees(rp.r2);
  double v = detail::binned_fraction_diff(pd1, rp.v_cap.size(), pd2,
                                          rp.v_cap.size(), bins, corrected,
                                          literal_denoms);
  return {v, StatId::PDD, Arity::Delta};
}

// Triangle Probability.  Triangles are enumerated node-wise in node-id
// order; with max_neighbors set, neighbor lists longer than the bound are
// subsampled uniformly with the provided generator.
inline StatisticValue triangle_prob(const GraphSnapshot& g,
                                    bool corrected = true,
                                    std::size_t max_neighbors = 0,
                                    Rng* rng = nullptr) {
  if (g.node_count() < 3)
    throw std::invalid_argument("triangle probability needs >= 3 nodes");
  double total = g.total_weight();
  if (total <= 0) throw std::invalid_argument("snapshot has zero weight");
  Adjacency adj(g);
  double winv = 1.0 / total;
  double sum = 0.0;
  auto term = [&](double wij, double wik, double wjk) {
    sum += (wij * winv) * (wik * winv) * (wjk * winv);
  };
  bool bounded = max_neighbors > 0;
  if (bounded) {
    std::size_t maxdeg = 0;
    for (const auto& nb : adj.neighbors) maxdeg = std::max(maxdeg, nb.size());
    if (maxdeg <= max_neighbors) bounded = false;
  }
  if (!bounded) {
    detail::for_each_triangle(adj, [&](NodeId, NodeId, NodeId, double wij,
                                       double wik, double wjk) {
      term(wij, wik, wjk);
    });
  } else {
    if (!rng)
      throw std::invalid_argument(
          "bounded triangle enumeration needs a generator");
    for (std::uint32_t p = 0; p < adj.nodes.size(); ++p) {
      NodeId i = adj.nodes[p];
      const auto& full = adj.neighbors[p];
      std::vector<std::pair<NodeId, double>> local;
      const std::vector<std::pair<NodeId, double>>* nb = &full;
      if (full.size() > max_neighbors) {
        auto pick = rng->sample_without_replacement(
            static_cast<std::uint32_t>(full.size()),
            static_cast<std::uint32_t>(max_neighbors));
        local.reserve(pick.size());
        for (auto idx : pick) local.push_back(full[idx]);
        nb = &local;
      }
      for (std::size_t x = 0; x < nb->size(); ++x) {
        if ((*nb)[x].first <= i) continue;
        for (std::size_t y = x + 1; y < nb->size(); ++y) {
          double wjk = g.weight((*nb)[x].first, (*nb)[y].first);
          if (wjk > 0) term((*nb)[x].second, (*nb)[y].second, wjk);
        }
      }
    }
  }
  double a = static_cast<double>(g.support_size());
  double v = a * a * a * sum / detail::choose3(g.node_count());
  if (corrected) v *= 1.0 - 3.0 / total;
  return {v, StatId::TP, Arity::Single};
}

// Latent triangle probability, exhaustive over the support.
inline StatisticValue triangle_prob_latent(const ProbMatrix& p) {
  if (p.nodes().size() < 3)
    throw std::invalid_argument("triangle probability needs >= 3 nodes");
  GraphSnapshot g;
  for (NodeId n : p.nodes()) g.add_node(n);
  for (const auto& [k, v] : p.cells()) g.add_weight(k.first, k.second, v);
  auto tv = triangle_prob(g, /*corrected=*/false);
  return {tv.value, StatId::TP, Arity::Single};
}

// Latent degree distribution difference (raw counts of row masses).
inline StatisticValue dd_latent(const ProbMatrix& p1, const ProbMatrix& p2,
                                const BinSpec& bins) {
  std::vector<double> c1(bins.bin_count, 0.0), c2(bins.bin_count, 0.0);
  for (const auto& [n, m] : p1.row_masses()) c1[bins.index(m)] += 1.0;
  for (const auto& [n, m] : p2.row_masses()) c2[bins.index(m)] += 1.0;
  double sum = 0.0;
  for (std::uint32_t k = 0; k < bins.bin_count; ++k) {
    double d = c1[k] - c2[k];
    sum += d * d;
  }
  return {sum, StatId::DD, Arity::Delta};
}

// Latent probabilistic degree distance (normalized bin fractions).
inline StatisticValue pdd_latent(const ProbMatrix& p1, const ProbMatrix& p2,
                                 const BinSpec& bins) {
  std::vector<double> v1, v2;
  double n1 = static_cast<double>(p1.nodes().size());
  double n2 = static_cast<double>(p2.nodes().size());
  for (const auto& [n, m] : p1.row_masses()) v1.push_back(n1 * m);
  for (const auto& [n, m] : p2.row_masses()) v2.push_back(n2 * m);
  double v = detail::binned_fraction_diff(v1, p1.nodes().size(), v2,
                                          p2.nodes().size(), bins,
                                          /*corrected=*/false);
  return {v, StatId::PDD, Arity::Delta};
}

}  // namespace consistat
