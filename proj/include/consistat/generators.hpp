#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "consistat/graph.hpp"
#include "consistat/prob.hpp"
#include "consistat/rng.hpp"

namespace consistat {

// How many nodes and messages one observed graph draws from the latent
// matrix.
struct SampleSpec {
  std::uint32_t n_nodes;
  std::uint64_t n_messages;
  std::uint64_t seed;
};

// Latent-matrix recipe.  mixture and triangle-rewire wrap nested configs.
struct GeneratorConfig {
  enum class Model { ChungLu, ErdosRenyi, Kpgm, Mixture, TriangleRewire };

  Model model = Model::ChungLu;
  double exponent = 2.0;    // chung-lu power-law exponent (> 1)
  double edge_prob = 0.01;  // erdos-renyi support probability
  std::array<std::array<double, 2>, 2> kpgm_seed{{{0.4, 0.3}, {0.3, 0.0}}};
  std::uint32_t kpgm_k = 8;
  std::shared_ptr<GeneratorConfig> base;  // mixture / triangle-rewire
  std::shared_ptr<GeneratorConfig> alt;   // mixture
  double alt_fraction = 0.05;             // mixture mass from alt
  double rho = 0.05;                      // triangle-rewire removal prob

  void validate() const {
    switch (model) {
      case Model::ChungLu:
        if (exponent <= 1.0)
          throw std::invalid_argument("chung-lu exponent must exceed 1");
        break;
      case Model::ErdosRenyi:
        if (edge_prob <= 0.0 || edge_prob > 1.0)
          throw std::invalid_argument("edge probability must lie in (0,1]");
        break;
      case Model::Kpgm:
        for (const auto& row : kpgm_seed)
          for (double v : row)
            if (v < 0.0 || v > 1.0)
              throw std::invalid_argument("kpgm seed entries must lie in [0,1]");
        if (kpgm_k == 0) throw std::invalid_argument("kpgm k must be positive");
        break;
      case Model::Mixture:
        if (!base || !alt)
          throw std::invalid_argument("mixture needs base and alt configs");
        if (alt_fraction < 0.0 || alt_fraction > 1.0)
          throw std::invalid_argument("alt fraction must lie in [0,1]");
        base->validate();
        alt->validate();
        break;
      case Model::TriangleRewire:
        if (!base)
          throw std::invalid_argument("triangle-rewire needs a base config");
        if (rho < 0.0 || rho > 1.0)
          throw std::invalid_argument("rho must lie in [0,1]");
        base->validate();
        break;
    }
  }
};

namespace detail {

// Weighted sampling tables over a sparse symmetric probability matrix, used
// by the rewiring random walk.
struct WalkTables {
  std::vector<NodeId> nodes;
  std::vector<double> node_cum;  // cumulative row masses
  std::map<NodeId, std::vector<std::pair<NodeId, double>>> rows;  // cum per row

  explicit WalkTables(const std::map<PairKey, double>& cells) {
    std::map<NodeId, std::vector<std::pair<NodeId, double>>> raw;
    for (const auto& [k, p] : cells) {
      raw[k.first].emplace_back(k.second, p);
      raw[k.second].emplace_back(k.first, p);
    }
    double acc = 0.0;
    for (auto& [n, nb] : raw) {
      double row = 0.0;
      for (auto& [m, p] : nb) {
        row += p;
        p = row;  // prefix sums within the row
      }
      nodes.push_back(n);
      acc += row;
      node_cum.push_back(acc);
      rows.emplace(n, std::move(nb));
    }
  }

  NodeId pick_start(Rng& rng) const {
    double u = rng.uniform() * node_cum.back();
    auto it = std::upper_bound(node_cum.begin(), node_cum.end(), u);
    std::size_t idx = it == node_cum.end() ? nodes.size() - 1
                                           : static_cast<std::size_t>(it - node_cum.begin());
    return nodes[idx];
  }

  NodeId step(NodeId from, Rng& rng) const {
    const auto& nb = rows.at(from);
    double u = rng.uniform() * nb.back().second;
    auto it = std::upper_bound(nb.begin(), nb.end(), u,
                               [](double x, const auto& p) { return x < p.second; });
    return it == nb.end() ? nb.back().first : it->first;
  }
};

inline std::map<PairKey, double> build_cells(const GeneratorConfig& config,
                                             std::uint32_t n_total,
                                             std::uint64_t seed);

inline std::map<PairKey, double> chung_lu_cells(double exponent,
                                                std::uint32_t n) {
  std::vector<double> theta(n);
  double power = -1.0 / (exponent - 1.0);
  for (std::uint32_t i = 0; i < n; ++i)
    theta[i] = std::pow(static_cast<double>(i + 1), power);
  double sum = 0.0, sumsq = 0.0;
  for (double t : theta) {
    sum += t;
    sumsq += t * t;
  }
  double z = 0.5 * (sum * sum - sumsq);
  std::map<PairKey, double> cells;
  auto hint = cells.end();
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j)
      hint = cells.emplace_hint(hint, PairKey{i, j}, theta[i] * theta[j] / z);
  return cells;
}

inline std::map<PairKey, double> erdos_renyi_cells(double p, std::uint32_t n,
                                                   std::uint64_t seed) {
  Rng rng = Rng::substream(seed, "pstar-er");
  std::vector<PairKey> support;
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) support.push_back({i, j});
  if (support.empty())
    throw std::invalid_argument("erdos-renyi support came up empty");
  std::map<PairKey, double> cells;
  double u = 1.0 / static_cast<double>(support.size());
  auto hint = cells.end();
  for (const auto& k : support) hint = cells.emplace_hint(hint, k, u);
  return cells;
}

inline std::map<PairKey, double> kpgm_cells(
    const std::array<std::array<double, 2>, 2>& seed, std::uint32_t k,
    std::uint32_t n_total) {
  std::uint32_t n = 1u << k;
  if (n_total != n)
    throw std::invalid_argument("kpgm node count must equal 2^k");
  std::map<PairKey, double> cells;
  double z = 0.0;
  auto hint = cells.end();
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j) {
      double p = 1.0;
      for (std::uint32_t b = 0; b < k && p > 0.0; ++b)
        p *= seed[(i >> b) & 1u][(j >> b) & 1u];
      if (p > 0.0) {
        hint = cells.emplace_hint(hint, PairKey{i, j}, p);
        z += p;
      }
    }
  if (cells.empty())
    throw std::invalid_argument("kpgm support came up empty");
  for (auto& [key, p] : cells) p /= z;
  return cells;
}

inline std::map<PairKey, double> mixture_cells(const GeneratorConfig& config,
                                               std::uint32_t n_total,
                                               std::uint64_t seed) {
  auto base = build_cells(*config.base, n_total,
                          splitmix64(seed ^ fnv1a64("mixture-base")));
  if (config.alt_fraction == 0.0) return base;
  auto alt = build_cells(*config.alt, n_total,
                         splitmix64(seed ^ fnv1a64("mixture-alt")));
  if (config.alt_fraction == 1.0) return alt;
  double f = config.alt_fraction;
  std::map<PairKey, double> cells;
  auto hint = cells.end();
  auto it1 = base.begin();
  auto it2 = alt.begin();
  while (it1 != base.end() || it2 != alt.end()) {
    if (it2 == alt.end() || (it1 != base.end() && it1->first < it2->first)) {
      hint = cells.emplace_hint(hint, it1->first, (1.0 - f) * it1->second);
      ++it1;
    } else if (it1 == base.end() || it2->first < it1->first) {
      hint = cells.emplace_hint(hint, it2->first, f * it2->second);
      ++it2;
    } else {
      hint = cells.emplace_hint(hint, it1->first,
                                (1.0 - f) * it1->second + f * it2->second);
      ++it1;
      ++it2;
    }
  }
  return cells;
}

inline std::map<PairKey, double> triangle_rewire_cells(
    const GeneratorConfig& config, std::uint32_t n_total, std::uint64_t seed) {
  auto cells = build_cells(*config.base, n_total,
                           splitmix64(seed ^ fnv1a64("rewire-base")));
  if (config.rho == 0.0) return cells;
  Rng rng = Rng::substream(seed, "pstar-rewire");
  WalkTables tables(cells);  // walks follow the original matrix
  std::vector<PairKey> removed;
  for (const auto& [k, p] : cells)
    if (rng.bernoulli(config.rho)) removed.push_back(k);
  if (removed.empty()) return cells;
  double removed_mass = 0.0;
  for (const auto& k : removed) {
    removed_mass += cells.at(k);
    cells.erase(k);
  }
  // One two-step-walk closure pair per removed pair; the freed mass is
  // spread uniformly over the closures.
  std::vector<PairKey> closures;
  for (std::size_t r = 0; r < removed.size(); ++r) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      NodeId start = tables.pick_start(rng);
      NodeId mid = tables.step(start, rng);
      NodeId end = tables.step(mid, rng);
      if (end != start) {
        closures.push_back(make_pair_key(start, end));
        break;
      }
    }
  }
  if (closures.empty())
    throw std::invalid_argument("triangle rewiring found no closure pairs");
  double share = removed_mass / static_cast<double>(closures.size());
  for (const auto& k : closures) cells[k] += share;
  return cells;
}

inline std::map<PairKey, double> build_cells(const GeneratorConfig& config,
                                             std::uint32_t n_total,
                                             std::uint64_t seed) {
  switch (config.model) {
    case GeneratorConfig::Model::ChungLu:
      return chung_lu_cells(config.exponent, n_total);
    case GeneratorConfig::Model::ErdosRenyi:
      return erdos_renyi_cells(config.edge_prob, n_total, seed);
    case GeneratorConfig::Model::Kpgm:
      return kpgm_cells(config.kpgm_seed, config.kpgm_k, n_total);
    case GeneratorConfig::Model::Mixture:
      return mixture_cells(config, n_total, seed);
    case GeneratorConfig::Model::TriangleRewire:
      return triangle_rewire_cells(config, n_total, seed);
  }
  throw std::invalid_argument("unknown generator model");
}

}  // namespace detail

inline ProbMatrix build_pstar(const GeneratorConfig& config,
                              std::uint32_t n_total, std::uint64_t seed) {
  if (n_total < 3) throw std::invalid_argument("need at least 3 nodes");
  config.validate();
  std::vector<NodeId> nodes(n_total);
  for (std::uint32_t i = 0; i < n_total; ++i) nodes[i] = i;
  return ProbMatrix(std::move(nodes),
                    detail::build_cells(config, n_total, seed),
                    ProbKind::LatentFull);
}

// One draw of the generative chain: sample the active node set uniformly,
// restrict-and-renormalize the latent matrix, then draw a multinomial
// message sample.  Isolated sampled nodes stay in the node set.
inline GraphSnapshot sample_graph(const ProbMatrix& pstar,
                                  const SampleSpec& spec) {
  if (spec.n_messages == 0)
    throw std::invalid_argument("need at least one message");
  const auto& all = pstar.nodes();
  if (spec.n_nodes > all.size())
    throw std::invalid_argument("node sample exceeds latent node count");
  Rng rng = Rng::substream(spec.seed, "sample-graph");
  std::vector<NodeId> chosen;
  if (spec.n_nodes == all.size()) {
    chosen = all;
  } else {
    auto idx = rng.sample_without_replacement(
        static_cast<std::uint32_t>(all.size()), spec.n_nodes);
    chosen.reserve(idx.size());
    for (auto i : idx) chosen.push_back(all[i]);
  }
  ProbMatrix p = restrict_and_renormalize(pstar, chosen);
  std::vector<PairKey> keys;
  std::vector<double> probs;
  keys.reserve(p.cells().size());
  probs.reserve(p.cells().size());
  for (const auto& [k, v] : p.cells()) {
    keys.push_back(k);
    probs.push_back(v);
  }
  auto counts = multinomial(spec.n_messages, probs, rng);
  GraphSnapshot g;
  for (NodeId n : chosen) g.add_node(n);
  for (std::size_t i = 0; i < keys.size(); ++i)
    if (counts[i] > 0)
      g.add_weight(keys[i].first, keys[i].second,
                   static_cast<double>(counts[i]));
  return g;
}

// Structural permutations applied to a realized snapshot; anomaly injection
// for the semi-synthetic pipeline.  All modes move whole message units.
struct PermutationMode {
  enum class Kind { Rewire, DegreeFlatten, CloseTriangles };
  Kind kind = Kind::Rewire;
  double f = 0.0;              // rewire / degree-flatten selection prob
  double top_frac = 0.5;       // degree-flatten high-degree cutoff
  std::uint64_t n_closures = 0;  // close-triangles count
};

inline GraphSnapshot permute_for_semisynthetic(const GraphSnapshot& base,
                                               const PermutationMode& mode,
                                               std::uint64_t seed) {
  if (base.node_count() == 0)
    throw std::invalid_argument("cannot permute an empty snapshot");
  Rng rng = Rng::substream(seed, "permute");
  auto nodes = base.nodes();
  auto random_pair = [&]() {
    std::size_t i = rng.below(nodes.size());
    std::size_t j = rng.below(nodes.size() - 1);
    if (j >= i) ++j;
    return make_pair_key(nodes[i], nodes[j]);
  };

  GraphSnapshot out(base.t_start(), base.t_end());
  for (NodeId n : nodes) out.add_node(n);

  switch (mode.kind) {
    case PermutationMode::Kind::Rewire: {
      if (mode.f < 0 || mode.f > 1)
        throw std::invalid_argument("rewire fraction must lie in [0,1]");
      for (const auto& [k, w] : base.edges()) {
        auto units = static_cast<std::uint64_t>(std::llround(w));
        double frac = w - static_cast<double>(units);
        std::uint64_t moved = rng.binomial(units, mode.f);
        double stay = static_cast<double>(units - moved) + frac;
        if (stay > 0) out.add_weight(k.first, k.second, stay);
        for (std::uint64_t m = 0; m < moved; ++m) {
          auto dest = random_pair();
          out.add_weight(dest.first, dest.second, 1.0);
        }
      }
      break;
    }
    case PermutationMode::Kind::DegreeFlatten: {
      if (mode.f < 0 || mode.f > 1 || mode.top_frac < 0 || mode.top_frac > 1)
        throw std::invalid_argument("degree-flatten fractions must lie in [0,1]");
      auto degs = base.weighted_degrees();
      std::vector<std::pair<double, NodeId>> order;
      for (const auto& [n, d] : degs) order.emplace_back(-d, n);
      std::sort(order.begin(), order.end());
      std::size_t n_top = static_cast<std::size_t>(
          std::ceil(mode.top_frac * static_cast<double>(nodes.size())));
      std::vector<NodeId> top;
      for (std::size_t i = 0; i < n_top && i < order.size(); ++i)
        top.push_back(order[i].second);
      std::sort(top.begin(), top.end());
      auto is_top = [&](NodeId n) {
        return std::binary_search(top.begin(), top.end(), n);
      };
      for (const auto& [k, w] : base.edges()) {
        bool eligible = is_top(k.first) || is_top(k.second);
        auto units = static_cast<std::uint64_t>(std::llround(w));
        double frac = w - static_cast<double>(units);
        std::uint64_t moved = eligible ? rng.binomial(units, mode.f) : 0;
        double stay = static_cast<double>(units - moved) + frac;
        if (stay > 0) out.add_weight(k.first, k.second, stay);
        for (std::uint64_t m = 0; m < moved; ++m) {
          auto dest = random_pair();
          out.add_weight(dest.first, dest.second, 1.0);
        }
      }
      break;
    }
    case PermutationMode::Kind::CloseTriangles: {
      if (base.total_weight() <= 0)
        throw std::invalid_argument("close-triangles needs positive weight");
      for (const auto& [k, w] : base.edges())
        out.add_weight(k.first, k.second, w);
      detail::WalkTables tables(base.edges());
      for (std::uint64_t c = 0; c < mode.n_closures; ++c) {
        for (int attempt = 0; attempt < 1000; ++attempt) {
          NodeId start = tables.pick_start(rng);
          NodeId mid = tables.step(start, rng);
          NodeId end = tables.step(mid, rng);
          if (end != start) {
            out.add_weight(start, end, 1.0);
            break;
          }
        }
      }
      break;
    }
  }
  return out;
}

// Pools a dynamic-network source into one latent-full matrix describing the
// network's average behavior.
inline ProbMatrix aggregate_real_source(
    const std::vector<GraphSnapshot>& snapshots) {
  if (snapshots.empty())
    throw std::invalid_argument("cannot aggregate an empty source");
  GraphSnapshot pooled;
  for (const auto& g : snapshots) {
    for (NodeId n : g.nodes()) pooled.add_node(n);
    for (const auto& [k, w] : g.edges()) pooled.add_weight(k.first, k.second, w);
  }
  double total = pooled.total_weight();
  if (total <= 0)
    throw std::invalid_argument("source aggregates to zero weight");
  std::map<PairKey, double> cells;
  for (const auto& [k, w] : pooled.edges()) cells[k] = w / total;
  return ProbMatrix(pooled.nodes(), std::move(cells), ProbKind::LatentFull);
}

}  // namespace consistat
