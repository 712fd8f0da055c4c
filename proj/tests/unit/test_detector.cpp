#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"

using namespace consistat;

TEST_CASE("critical points use nearest-rank order statistics") {
  std::vector<double> v;
  for (int i = 1; i <= 100; ++i) v.push_back(static_cast<double>(i));
  auto [lo, hi] = critical_points(v, 0.05);
  CHECK(lo == 3.0);   // ceil(100 * 0.025) = 3
  CHECK(hi == 98.0);  // ceil(100 * 0.975) = 98
}

TEST_CASE("critical points on degenerate and tiny samples") {
  auto [lo, hi] = critical_points({5.0, 5.0, 5.0}, 0.05);
  CHECK(lo == 5.0);
  CHECK(hi == 5.0);
  auto [l2, h2] = critical_points({1.0, 2.0}, 0.5);
  CHECK(l2 == 1.0);
  CHECK(h2 == 2.0);
  CHECK_THROWS_AS(critical_points({1.0}, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(critical_points({1.0, 2.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(critical_points({1.0, 2.0}, 1.0), std::invalid_argument);
}

TEST_CASE("critical band widens as alpha shrinks") {
  Rng rng(10);
  std::vector<double> v;
  for (int i = 0; i < 200; ++i) v.push_back(rng.normal());
  double last_width = -1.0;
  for (double a : {0.5, 0.2, 0.1, 0.05, 0.01}) {
    auto [lo, hi] = critical_points(v, a);
    double width = hi - lo;
    CHECK(width >= last_width);
    last_width = width;
  }
}

TEST_CASE("a constant series is never flagged") {
  StatisticSeries s;
  s.values.assign(120, 1.0);
  DetectorConfig cfg;
  cfg.window = 50;
  auto results = detect_stream(s, cfg);
  for (const auto& r : results) CHECK_FALSE(r.flagged);
}

TEST_CASE("a spike after warm-up is flagged, warm-up spikes are not") {
  Rng rng(1);
  StatisticSeries s;
  for (int i = 0; i < 120; ++i) s.values.push_back(rng.normal(0.0, 1.0));
  s.values[10] = 100.0;  // inside warm-up for window 50
  s.values[90] = 100.0;
  s.values[100] = -100.0;
  DetectorConfig cfg;
  cfg.window = 50;
  cfg.alpha = 0.05;
  auto results = detect_stream(s, cfg);
  CHECK(results[10].warmup);
  CHECK_FALSE(results[10].flagged);
  CHECK_FALSE(results[90].warmup);
  CHECK(results[90].flagged);
  CHECK(results[100].flagged);  // two-tailed: low outliers flag too
}

TEST_CASE("missing values are skipped when building the null window") {
  StatisticSeries s;
  for (int i = 0; i < 20; ++i) {
    s.values.push_back(static_cast<double>(i % 5));
    s.values.push_back(std::nullopt);
  }
  DetectorConfig cfg;
  cfg.window = 10;
  auto results = detect_stream(s, cfg);
  // at t = 39 there are 20 available values before it; window uses 10
  CHECK(results[39].window_size_used == 10);
  CHECK_FALSE(results[39].warmup);
  // a missing test value is never flagged
  CHECK_FALSE(results[39].flagged);
  CHECK_FALSE(results[39].value.has_value());
}

TEST_CASE("detector false positive rate on iid noise is near alpha") {
  DetectorConfig cfg;
  cfg.window = 50;
  cfg.alpha = 0.05;
  std::size_t flags = 0, tested = 0;
  for (int run = 0; run < 60; ++run) {
    Rng rng(1000 + run);
    StatisticSeries s;
    for (int i = 0; i < 150; ++i) s.values.push_back(rng.normal());
    for (const auto& r : detect_stream(s, cfg)) {
      if (r.warmup) continue;
      ++tested;
      if (r.flagged) ++flags;
    }
  }
  double rate = static_cast<double>(flags) / static_cast<double>(tested);
  // nearest-rank on 50 values at alpha=0.05 is conservative but should stay
  // within a loose calibration band
  CHECK(rate > 0.02);
  CHECK(rate < 0.10);
}

TEST_CASE("compute_series over identical snapshots yields zero deltas") {
  Rng rng(4);
  auto g = testutil::random_graph(rng, 10, 0.6);
  std::vector<GraphSnapshot> stream(12, g);
  DetectorConfig cfg;
  cfg.stat = StatId::MS;
  cfg.corrected = false;
  auto series = compute_series(stream, cfg);
  REQUIRE(series.values.size() == 12);
  CHECK_FALSE(series.values[0].has_value());  // no baseline at t=0
  for (std::size_t t = 1; t < series.values.size(); ++t) {
    REQUIRE(series.values[t].has_value());
    CHECK(*series.values[t] == Catch::Approx(0.0).margin(1e-12));
  }
}

TEST_CASE("single statistics have a value at t=0") {
  std::vector<GraphSnapshot> stream(3, testutil::make_graph(
      {0, 1, 2}, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}}));
  DetectorConfig cfg;
  cfg.stat = StatId::TP;
  cfg.corrected = false;
  auto series = compute_series(stream, cfg);
  REQUIRE(series.values[0].has_value());
  CHECK(*series.values[0] == Catch::Approx(1.0));
  cfg.stat = StatId::CB;
  auto cb = compute_series(stream, cfg);
  CHECK(*cb.values[0] == Catch::Approx(1.0));
}

TEST_CASE("aggregate baseline of identical history matches previous baseline") {
  Rng rng(6);
  auto g = testutil::random_graph(rng, 10, 0.6);
  auto h = testutil::random_graph(rng, 10, 0.6);
  std::vector<GraphSnapshot> stream(8, g);
  stream.push_back(h);
  DetectorConfig prev;
  prev.stat = StatId::GED;
  DetectorConfig agg = prev;
  agg.baseline = DeltaBaseline::Aggregate;
  agg.baseline_k = 5;
  auto s1 = compute_series(stream, prev);
  auto s2 = compute_series(stream, agg);
  // history is constant, so aggregating it changes nothing
  REQUIRE(s1.values.back().has_value());
  CHECK(*s1.values.back() == Catch::Approx(*s2.values.back()));
}

TEST_CASE("empty snapshots produce missing values rather than failures") {
  auto g = testutil::make_graph({0, 1, 2}, {{0, 1, 2.0}, {1, 2, 2.0}});
  GraphSnapshot empty;
  std::vector<GraphSnapshot> stream{g, empty, g};
  DetectorConfig cfg;
  cfg.stat = StatId::MS;
  auto series = compute_series(stream, cfg);
  CHECK_FALSE(series.values[1].has_value());  // empty test snapshot
  CHECK_FALSE(series.values[2].has_value());  // empty baseline
}

TEST_CASE("prior smoothing makes empty-intersection steps computable") {
  auto g1 = testutil::make_graph({0, 1}, {{0, 1, 4.0}});
  auto g2 = testutil::make_graph({0, 1}, {});
  std::vector<GraphSnapshot> stream{g1, g2};
  DetectorConfig plain;
  plain.stat = StatId::MS;
  auto s0 = compute_series(stream, plain);
  CHECK_FALSE(s0.values[1].has_value());  // zero-weight test snapshot
  DetectorConfig prior = plain;
  prior.smoothing = Smoothing::Prior;
  prior.prior_c = 0.5;
  auto s1 = compute_series(stream, prior);
  CHECK(s1.values[1].has_value());
}

TEST_CASE("aggregate smoothing damps an isolated disturbance") {
  auto base = testutil::make_graph({0, 1, 2}, {{0, 1, 10.0}, {1, 2, 10.0}});
  auto odd = testutil::make_graph({0, 1, 2}, {{0, 2, 20.0}});
  std::vector<GraphSnapshot> stream(6, base);
  stream.push_back(odd);
  DetectorConfig plain;
  plain.stat = StatId::MS;
  plain.corrected = false;
  DetectorConfig smooth = plain;
  smooth.smoothing = Smoothing::Aggregate;
  smooth.smoothing_k = 4;
  auto s_plain = compute_series(stream, plain);
  auto s_smooth = compute_series(stream, smooth);
  REQUIRE(s_plain.values.back().has_value());
  REQUIRE(s_smooth.values.back().has_value());
  CHECK(*s_smooth.values.back() < *s_plain.values.back());
}

TEST_CASE("detector config validation") {
  DetectorConfig cfg;
  cfg.window = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.window = 50;
  cfg.alpha = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.alpha = 0.05;
  cfg.smoothing = Smoothing::Aggregate;
  cfg.smoothing_k = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("stat id strings round-trip") {
  for (auto id : {StatId::GED, StatId::DD, StatId::CB, StatId::DELTACON,
                  StatId::NETSIMILE, StatId::MS, StatId::PDD, StatId::TP})
    CHECK(stat_id_from_string(to_string(id)) == id);
  CHECK(to_string(StatId::MS) == "ms");
  CHECK(to_string(StatId::CB) == "barrat");
  CHECK_THROWS_AS(stat_id_from_string("bogus"), std::invalid_argument);
  CHECK(is_delta_stat(StatId::MS));
  CHECK_FALSE(is_delta_stat(StatId::TP));
  CHECK_FALSE(is_delta_stat(StatId::CB));
}
