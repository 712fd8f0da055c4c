#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "consistat/detector.hpp"
#include "consistat/generators.hpp"
#include "consistat/graph.hpp"
#include "consistat/stats.hpp"

namespace consistat {

// Node/message sizes for one experimental graph set; message counts are
// drawn uniformly from [msg_lo, msg_hi] per trial.
struct SizeRange {
  std::uint32_t n_nodes = 1000;
  std::uint64_t msg_lo = 30000;
  std::uint64_t msg_hi = 40000;
};

inline std::vector<double> default_alpha_grid() {
  return {0.001, 0.005, 0.01, 0.025, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9};
}

struct ExperimentSpec {
  GeneratorConfig normal_config;
  GeneratorConfig anomalous_config;
  std::uint32_t n_total = 2500;
  std::uint32_t n_trials = 50;
  SizeRange normal_sizes{1000, 30000, 40000};
  SizeRange fp_sizes{1000, 40000, 50000};  // differs from normal in size only
  SizeRange tp_sizes{1000, 30000, 40000};  // matches normal sizes
  StatId stat = StatId::MS;
  bool corrected = true;
  std::vector<double> alphas = default_alpha_grid();
  std::uint64_t seed = 0;
  std::size_t max_neighbors = 0;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double alpha = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // sorted by fpr
  double auc = 0.0;
  RocPoint marked;  // the alpha = 0.05 operating point
};

// Raw per-trial statistic values for the three graph sets.
struct ExperimentValues {
  std::vector<double> normal;
  std::vector<double> fp;
  std::vector<double> tp;
};

namespace detail {

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view name,
                                 std::uint64_t index) {
  std::uint64_t s = splitmix64(root ^ fnv1a64(name));
  return splitmix64(s ^ (index * 0x9e3779b97f4a7c15ULL));
}

inline std::uint64_t draw_messages(const SizeRange& sz, Rng& rng) {
  if (sz.msg_hi < sz.msg_lo)
    throw std::invalid_argument("message range is inverted");
  if (sz.msg_hi == sz.msg_lo) return sz.msg_lo;
  return sz.msg_lo + rng.below(sz.msg_hi - sz.msg_lo + 1);
}

// One statistic evaluation; delta statistics get a normal reference graph.
struct StatEvaluator {
  StatId stat;
  bool corrected;
  std::size_t max_neighbors;
  Rng tp_rng;

  StatEvaluator(StatId s, bool c, std::size_t mn, std::uint64_t seed)
      : stat(s), corrected(c), max_neighbors(mn),
        tp_rng(Rng::substream(seed, "eval-tp")) {}

  double single(const GraphSnapshot& g) {
    switch (stat) {
      case StatId::CB:
        return barrat_clustering(g).value;
      case StatId::TP:
        return triangle_prob(g, corrected, max_neighbors, &tp_rng).value;
      default:
        throw std::invalid_argument("statistic is not single-graph");
    }
  }

  double delta(const GraphSnapshot& ref, const GraphSnapshot& test) {
    switch (stat) {
      case StatId::GED:
        return ged(ref, test).value;
      case StatId::DD:
        return degree_dist_diff(ref, test, default_dd_bins(ref, test)).value;
      case StatId::DELTACON:
        return deltacon_distance(ref, test).value;
      case StatId::NETSIMILE:
        return netsimile_distance(ref, test).value;
      case StatId::MS:
        return mass_shift(ref, test, corrected).value;
      case StatId::PDD:
        return pdd(ref, test, default_pdd_bins(ref, test), corrected).value;
      default:
        throw std::invalid_argument("statistic is not a delta statistic");
    }
  }

  double evaluate(const ProbMatrix& test_matrix, const ProbMatrix& ref_matrix,
                  const SizeRange& test_sizes, const SizeRange& ref_sizes,
                  std::uint64_t root_seed, std::string_view set_name,
                  std::uint64_t trial) {
    Rng size_rng = Rng::substream(derive_seed(root_seed, set_name, trial),
                                  "sizes");
    SampleSpec test_spec{test_sizes.n_nodes, draw_messages(test_sizes, size_rng),
                         derive_seed(root_seed, std::string(set_name) + "-test",
                                     trial)};
    GraphSnapshot test = sample_graph(test_matrix, test_spec);
    if (!is_delta_stat(stat)) return single(test);
    SampleSpec ref_spec{ref_sizes.n_nodes, draw_messages(ref_sizes, size_rng),
                        derive_seed(root_seed, std::string(set_name) + "-ref",
                                    trial)};
    GraphSnapshot ref = sample_graph(ref_matrix, ref_spec);
    return delta(ref, test);
  }
};

}  // namespace detail

// Fraction of `values` outside the two-tailed critical points of `null`.
inline double rejection_rate(const std::vector<double>& null_sample,
                             const std::vector<double>& values, double alpha) {
  auto [lo, hi] = critical_points(null_sample, alpha);
  std::size_t outside = 0;
  for (double v : values)
    if (v < lo || v > hi) ++outside;
  return values.empty() ? 0.0
                        : static_cast<double>(outside) /
                              static_cast<double>(values.size());
}

inline RocCurve roc_from_values(const ExperimentValues& values,
                                const std::vector<double>& alphas) {
  if (alphas.empty()) throw std::invalid_argument("need at least one alpha");
  RocCurve roc;
  double best_gap = std::numeric_limits<double>::infinity();
  for (double a : alphas) {
    RocPoint p{rejection_rate(values.normal, values.fp, a),
               rejection_rate(values.normal, values.tp, a), a};
    roc.points.push_back(p);
    double gap = std::abs(a - 0.05);
    if (gap < best_gap) {
      best_gap = gap;
      roc.marked = p;
    }
  }
  std::sort(roc.points.begin(), roc.points.end(),
            [](const RocPoint& x, const RocPoint& y) {
              return x.fpr < y.fpr || (x.fpr == y.fpr && x.tpr < y.tpr);
            });
  // trapezoid over the sorted points augmented with the (0,0)/(1,1) corners
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
  for (const auto& p : roc.points) pts.emplace_back(p.fpr, p.tpr);
  pts.emplace_back(1.0, 1.0);
  double auc = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    auc += 0.5 * (pts[i].first - pts[i - 1].first) *
           (pts[i].second + pts[i - 1].second);
  roc.auc = auc;
  return roc;
}

// Draws the three per-trial value sets of the synthetic procedure: normal
// (null), false-positive (same model, different size), and true-positive
// (anomalous model, normal size).  Delta statistics are evaluated against a
// fresh normal reference graph.
inline ExperimentValues synthetic_values(const ExperimentSpec& spec,
                                         const ProbMatrix& p_normal,
                                         const ProbMatrix& p_anomalous) {
  ExperimentValues out;
  detail::StatEvaluator ev(spec.stat, spec.corrected, spec.max_neighbors,
                           spec.seed);
  for (std::uint64_t i = 0; i < spec.n_trials; ++i) {
    out.normal.push_back(ev.evaluate(p_normal, p_normal, spec.normal_sizes,
                                     spec.normal_sizes, spec.seed, "normal", i));
    out.fp.push_back(ev.evaluate(p_normal, p_normal, spec.fp_sizes,
                                 spec.normal_sizes, spec.seed, "fp", i));
    out.tp.push_back(ev.evaluate(p_anomalous, p_normal, spec.tp_sizes,
                                 spec.normal_sizes, spec.seed, "tp", i));
  }
  return out;
}

struct ExperimentResult {
  RocCurve roc;
  ExperimentValues values;
};

inline ExperimentResult run_synthetic(const ExperimentSpec& spec) {
  spec.normal_config.validate();
  spec.anomalous_config.validate();
  ProbMatrix p_normal = build_pstar(spec.normal_config, spec.n_total,
                                    detail::derive_seed(spec.seed, "pstar-n", 0));
  ProbMatrix p_anom = build_pstar(spec.anomalous_config, spec.n_total,
                                  detail::derive_seed(spec.seed, "pstar-a", 0));
  ExperimentResult result;
  result.values = synthetic_values(spec, p_normal, p_anom);
  result.roc = roc_from_values(result.values, spec.alphas);
  return result;
}

// Same machinery with reusable latent matrices (several statistics share the
// same sampled graphs' distribution, and replications rebuild nothing).
inline ExperimentResult run_synthetic_with(const ExperimentSpec& spec,
                                           const ProbMatrix& p_normal,
                                           const ProbMatrix& p_anomalous) {
  ExperimentResult result;
  result.values = synthetic_values(spec, p_normal, p_anomalous);
  result.roc = roc_from_values(result.values, spec.alphas);
  return result;
}

struct SemiSyntheticSpec {
  PermutationMode mode;
  std::uint32_t n_trials = 50;
  SizeRange normal_sizes;
  SizeRange fp_sizes;
  SizeRange tp_sizes;
  StatId stat = StatId::MS;
  bool corrected = true;
  std::vector<double> alphas = default_alpha_grid();
  std::uint64_t seed = 0;
  std::size_t max_neighbors = 0;
};

// Semi-synthetic driver: the normal matrix pools the real source; the
// anomalous matrix pools a structurally permuted copy of it.
inline ExperimentResult run_semisynthetic(
    const std::vector<GraphSnapshot>& source, const SemiSyntheticSpec& spec) {
  ProbMatrix p_normal = aggregate_real_source(source);
  std::vector<GraphSnapshot> permuted;
  permuted.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i)
    permuted.push_back(permute_for_semisynthetic(
        source[i], spec.mode, detail::derive_seed(spec.seed, "permute", i)));
  ProbMatrix p_anom = aggregate_real_source(permuted);
  ExperimentSpec inner;
  inner.n_trials = spec.n_trials;
  inner.normal_sizes = spec.normal_sizes;
  inner.fp_sizes = spec.fp_sizes;
  inner.tp_sizes = spec.tp_sizes;
  inner.stat = spec.stat;
  inner.corrected = spec.corrected;
  inner.alphas = spec.alphas;
  inner.seed = spec.seed;
  inner.max_neighbors = spec.max_neighbors;
  ExperimentResult result;
  result.values = synthetic_values(inner, p_normal, p_anom);
  result.roc = roc_from_values(result.values, spec.alphas);
  return result;
}

enum class SweepAxis { Edges, Nodes, ModelParam };

struct SweepRow {
  double x = 0.0;
  double flag_rate = 0.0;
};

// Sensitivity sweep at alpha = 0.05.  Size axes vary the false-positive
// set's size and report its rejection rate; the model-parameter axis varies
// the anomaly strength and reports the true-positive rate.
inline std::vector<SweepRow> sweep_sensitivity(const ExperimentSpec& base,
                                               SweepAxis axis,
                                               const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
  std::vector<SweepRow> rows;
  ProbMatrix p_normal = build_pstar(base.normal_config, base.n_total,
                                    detail::derive_seed(base.seed, "pstar-n", 0));
  for (double x : grid) {
    ExperimentSpec spec = base;
    if (axis == SweepAxis::Edges) {
      auto m = static_cast<std::uint64_t>(x);
      spec.fp_sizes.msg_lo = spec.fp_sizes.msg_hi = m;
    } else if (axis == SweepAxis::Nodes) {
      spec.fp_sizes.n_nodes = static_cast<std::uint32_t>(x);
    } else {
      if (spec.anomalous_config.model == GeneratorConfig::Model::Mixture)
        spec.anomalous_config.alt_fraction = x;
      else if (spec.anomalous_config.model ==
               GeneratorConfig::Model::TriangleRewire)
        spec.anomalous_config.rho = x;
      else
        throw std::invalid_argument(
            "model-parameter sweep needs a mixture or triangle-rewire anomaly");
    }
    ProbMatrix p_anom =
        build_pstar(spec.anomalous_config, spec.n_total,
                    detail::derive_seed(spec.seed, "pstar-a", 0));
    ExperimentValues values = synthetic_values(spec, p_normal, p_anom);
    double rate = axis == SweepAxis::ModelParam
                      ? rejection_rate(values.normal, values.tp, 0.05)
                      : rejection_rate(values.normal, values.fp, 0.05);
    rows.push_back({x, rate});
  }
  return rows;
}

}  // namespace consistat
