#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "consistat/graph.hpp"
#include "consistat/stats.hpp"

namespace consistat {

enum class Smoothing { None, Aggregate, Prior };
enum class DeltaBaseline { Previous, Aggregate };

struct DetectorConfig {
  StatId stat = StatId::MS;
  std::uint32_t window = 50;
  double alpha = 0.05;
  bool corrected = true;
  Smoothing smoothing = Smoothing::None;
  std::uint32_t smoothing_k = 5;  // aggregate smoothing width
  double prior_c = 0.0;           // prior smoothing pseudo-weight
  DeltaBaseline baseline = DeltaBaseline::Previous;
  std::uint32_t baseline_k = 5;   // aggregate baseline width
  std::size_t max_neighbors = 0;  // tp enumeration bound (0 = exhaustive)
  std::uint64_t seed = 0;

  void validate() const {
    if (window < 2) throw std::invalid_argument("window must be at least 2");
    if (alpha <= 0.0 || alpha >= 1.0)
      throw std::invalid_argument("alpha must lie in (0,1)");
    if (smoothing == Smoothing::Aggregate && smoothing_k == 0)
      throw std::invalid_argument("aggregate smoothing needs k >= 1");
    if (baseline == DeltaBaseline::Aggregate && baseline_k == 0)
      throw std::invalid_argument("aggregate baseline needs k >= 1");
    if (prior_c < 0) throw std::invalid_argument("prior weight must be >= 0");
  }
};

// Per-time-step statistic values; entries without a value mark steps where
// the statistic was not computable (empty snapshot, empty intersection).
struct StatisticSeries {
  StatId id = StatId::MS;
  std::vector<std::optional<double>> values;
};

struct DetectionResult {
  std::size_t t = 0;
  std::optional<double> value;
  double lower_cp = 0.0;
  double upper_cp = 0.0;
  bool flagged = false;
  std::uint32_t window_size_used = 0;
  bool warmup = true;
};

// Two-tailed nearest-rank critical points: the alpha/2 and 1-alpha/2 order
// statistics of the null sample.
inline std::pair<double, double> critical_points(std::vector<double> null_values,
                                                 double alpha) {
  if (null_values.size() < 2)
    throw std::invalid_argument("need at least two null values");
  if (alpha <= 0.0 || alpha >= 1.0)
    throw std::invalid_argument("alpha must lie in (0,1)");
  std::sort(null_values.begin(), null_values.end());
  auto n = static_cast<double>(null_values.size());
  auto rank = [&](double q) {
    auto r = static_cast<std::size_t>(std::ceil(n * q));
    if (r < 1) r = 1;
    if (r > null_values.size()) r = null_values.size();
    return null_values[r - 1];
  };
  return {rank(alpha / 2.0), rank(1.0 - alpha / 2.0)};
}

// Evaluates the configured statistic at every time step.  Delta statistics
// compare each snapshot against the configured baseline; statistic errors
// at a step become missing values rather than aborting the stream.
inline StatisticSeries compute_series(const std::vector<GraphSnapshot>& snapshots,
                                      const DetectorConfig& config) {
  if (snapshots.empty())
    throw std::invalid_argument("cannot compute a series over no snapshots");
  config.validate();
  StatisticSeries series;
  series.id = config.stat;
  series.values.resize(snapshots.size());

  auto smooth_test = [&](std::size_t t) {
    if (config.smoothing == Smoothing::Aggregate) {
      std::size_t lo = t + 1 >= config.smoothing_k ? t + 1 - config.smoothing_k : 0;
      std::vector<GraphSnapshot> window(snapshots.begin() + lo,
                                        snapshots.begin() + t + 1);
      return aggregate_window(window);
    }
    GraphSnapshot g = snapshots[t];
    if (config.smoothing == Smoothing::Prior) g = apply_prior(g, config.prior_c);
    return g;
  };
  auto baseline_for = [&](std::size_t t) -> std::optional<GraphSnapshot> {
    if (t == 0) return std::nullopt;
    GraphSnapshot g;
    if (config.baseline == DeltaBaseline::Previous) {
      g = snapshots[t - 1];
    } else {
      std::size_t lo = t >= config.baseline_k ? t - config.baseline_k : 0;
      std::vector<GraphSnapshot> window(snapshots.begin() + lo,
                                        snapshots.begin() + t);
      g = aggregate_window(window);
    }
    if (config.smoothing == Smoothing::Prior) g = apply_prior(g, config.prior_c);
    return g;
  };

  Rng rng = Rng::substream(config.seed, "detect-tp");
  for (std::size_t t = 0; t < snapshots.size(); ++t) {
    try {
      GraphSnapshot test = smooth_test(t);
      double v;
      switch (config.stat) {
        case StatId::CB:
          v = barrat_clustering(test).value;
          break;
        case StatId::TP:
          v = triangle_prob(test, config.corrected, config.max_neighbors, &rng)
                  .value;
          break;
        default: {
          auto ref = baseline_for(t);
          if (!ref) { series.values[t] = std::nullopt; continue; }
          switch (config.stat) {
            case StatId::GED:
              v = ged(*ref, test).value;
              break;
            case StatId::DD:
              v = degree_dist_diff(*ref, test, default_dd_bins(*ref, test)).value;
              break;
            case StatId::DELTACON:
              v = deltacon_distance(*ref, test).value;
              break;
            case StatId::NETSIMILE:
              v = netsimile_distance(*ref, test).value;
              break;
            case StatId::MS:
              v = mass_shift(*ref, test, config.corrected).value;
              break;
            case StatId::PDD:
              v = pdd(*ref, test, default_pdd_bins(*ref, test), config.corrected)
                      .value;
              break;
            default:
              throw std::invalid_argument("unhandled statistic");
          }
        }
      }
      series.values[t] = v;
    } catch (const std::invalid_argument&) {
      series.values[t] = std::nullopt;  // uncomputable at this step
    }
  }
  return series;
}

// Sliding-window two-tailed test.  The null sample for step t is the most
// recent `window` available values before t; steps with fewer available
// values are warm-up and never flagged.
inline std::vector<DetectionResult> detect_stream(const StatisticSeries& series,
                                                  const DetectorConfig& config) {
  config.validate();
  std::vector<DetectionResult> out;
  out.reserve(series.values.size());
  for (std::size_t t = 0; t < series.values.size(); ++t) {
    DetectionResult r;
    r.t = t;
    r.value = series.values[t];
    std::vector<double> null_values;
    for (std::size_t j = t; j-- > 0 && null_values.size() < config.window;)
      if (series.values[j]) null_values.push_back(*series.values[j]);
    r.window_size_used = static_cast<std::uint32_t>(null_values.size());
    r.warmup = null_values.size() < config.window;
    if (null_values.size() >= 2) {
      auto [lo, hi] = critical_points(null_values, config.alpha);
      r.lower_cp = lo;
      r.upper_cp = hi;
      if (!r.warmup && r.value)
        r.flagged = *r.value < r.lower_cp || *r.value > r.upper_cp;
    } else if (r.value) {
      r.lower_cp = r.upper_cp = *r.value;
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace consistat
