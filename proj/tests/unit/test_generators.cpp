#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "helpers.hpp"

using namespace consistat;

TEST_CASE("kpgm cells for k=1 reproduce the seed matrix") {
  std::array<std::array<double, 2>, 2> seed{{{0.4, 0.3}, {0.3, 0.0}}};
  auto cells = detail::kpgm_cells(seed, 1, 2);
  // only the off-diagonal pair (0,1) survives, normalized to 1
  REQUIRE(cells.size() == 1);
  CHECK(cells.at(PairKey{0, 1}) == Catch::Approx(1.0));
}

TEST_CASE("kpgm support follows the zero in the seed matrix") {
  GeneratorConfig cfg;
  cfg.model = GeneratorConfig::Model::Kpgm;
  cfg.kpgm_k = 3;
  auto p = build_pstar(cfg, 8, 0);
  // seed[1][1] = 0, so any pair with a shared set bit has probability 0
  for (const auto& [k, v] : p.cells()) {
    CHECK((k.first & k.second) == 0u);
    CHECK(v > 0.0);
  }
  double sum = 0.0;
  for (const auto& [k, v] : p.cells()) sum += v;
  CHECK(sum == Catch::Approx(1.0));
}

TEST_CASE("kpgm rejects node counts that are not 2^k") {
  GeneratorConfig cfg;
  cfg.model = GeneratorConfig::Model::Kpgm;
  cfg.kpgm_k = 3;
  CHECK_THROWS_AS(build_pstar(cfg, 9, 0), std::invalid_argument);
}

TEST_CASE("chung-lu latent degrees follow the configured power law") {
  GeneratorConfig cfg;
  cfg.model = GeneratorConfig::Model::ChungLu;
  cfg.exponent = 2.0;
  auto p = build_pstar(cfg, 500, 0);
  auto rows = p.row_masses();
  // log(row mass) vs log(rank+1) should have slope close to -1/(alpha-1) = -1
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::uint32_t n = 0;
  for (NodeId i = 0; i < 200; ++i) {  // head of the ranking, least distorted
    double x = std::log(static_cast<double>(i + 1));
    double y = std::log(rows.at(i));
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++n;
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == Catch::Approx(-1.0).margin(0.3));
}

TEST_CASE("erdos-renyi cells are uniform over the drawn support") {
  GeneratorConfig cfg;
  cfg.model = GeneratorConfig::Model::ErdosRenyi;
  cfg.edge_prob = 0.2;
  auto p = build_pstar(cfg, 40, 7);
  double expect = 1.0 / static_cast<double>(p.support_size());
  for (const auto& [k, v] : p.cells()) CHECK(v == Catch::Approx(expect));
  // support size concentrates near p * C(40,2) = 156
  CHECK(p.support_size() > 100);
  CHECK(p.support_size() < 220);
}

TEST_CASE("mixture with zero alt fraction is exactly the base matrix") {
  GeneratorConfig cfg;
  cfg.model = GeneratorConfig::Model::Mixture;
  cfg.base = std::make_shared<GeneratorConfig>();
  cfg.base->model = GeneratorConfig::Model::ChungLu;
  cfg.alt = std::make_shared<GeneratorConfig>();
  cfg.alt->model = GeneratorConfig::Model::ErdosRenyi;
  cfg.alt->edge_prob = 0.3;
  cfg.alt_fraction = 0.0;
  auto mixed = build_pstar(cfg, 30, 5);
  auto base = build_pstar(*cfg.base, 30, 5);
  REQUIRE(mixed.support_size() == base.support_size());
  for (const auto& [k, v] : mixed.cells())
    CHECK(v == base.prob(k.first, k.second));
}

TEST_CASE("mixture combines cell masses linearly") {
  GeneratorConfig cfg;
  cfg.model = GeneratorConfig::Model::Mixture;
  cfg.base = std::make_shared<GeneratorConfig>();
  cfg.base->model = GeneratorConfig::Model::ChungLu;
  cfg.alt = std::make_shared<GeneratorConfig>();
  cfg.alt->model = GeneratorConfig::Model::ErdosRenyi;
  cfg.alt->edge_prob = 0.3;
  cfg.alt_fraction = 0.25;
  auto mixed = build_pstar(cfg, 30, 5);
  double sum = 0.0;
  for (const auto& [k, v] : mixed.cells()) sum += v;
  CHECK(sum == Catch::Approx(1.0));
  // every base cell keeps at least (1-f) of its mass
  auto base = build_pstar(*cfg.base, 30, 5);
  for (const auto& [k, v] : base.cells())
    CHECK(mixed.prob(k.first, k.second) >= 0.75 * v - 1e-12);
}

TEST_CASE("triangle rewiring conserves probability mass") {
  GeneratorConfig cfg;
  cfg.model = GeneratorConfig::Model::TriangleRewire;
  cfg.base = std::make_shared<GeneratorConfig>();
  cfg.base->model = GeneratorConfig::Model::Kpgm;
  cfg.base->kpgm_k = 6;
  cfg.rho = 0.2;
  auto p = build_pstar(cfg, 64, 3);
  double sum = 0.0;
  for (const auto& [k, v] : p.cells()) sum += v;
  CHECK(sum == Catch::Approx(1.0));
}

TEST_CASE("triangle rewiring with rho=0 is the identity") {
  GeneratorConfig cfg;
  cfg.model = GeneratorConfig::Model::TriangleRewire;
  cfg.base = std::make_shared<GeneratorConfig>();
  cfg.base->model = GeneratorConfig::Model::ChungLu;
  cfg.rho = 0.0;
  auto p = build_pstar(cfg, 40, 3);
  auto base = build_pstar(*cfg.base, 40, 3);
  REQUIRE(p.support_size() == base.support_size());
  for (const auto& [k, v] : p.cells())
    CHECK(v == base.prob(k.first, k.second));
}

TEST_CASE("triangle rewiring shifts the latent triangle probability") {
  // rewiring trades removed cells (which destroy triangles) for walk
  // closures (which create them); the net latent TP moves measurably
  GeneratorConfig base;
  base.model = GeneratorConfig::Model::Kpgm;
  base.kpgm_k = 7;
  GeneratorConfig cfg;
  cfg.model = GeneratorConfig::Model::TriangleRewire;
  cfg.base = std::make_shared<GeneratorConfig>(base);
  cfg.rho = 0.3;
  double tp_base = triangle_prob_latent(build_pstar(base, 128, 0)).value;
  double mean_abs_shift = 0.0;
  const int reps = 10;
  for (int r = 0; r < reps; ++r)
    mean_abs_shift += std::abs(
        triangle_prob_latent(build_pstar(cfg, 128, r)).value - tp_base);
  mean_abs_shift /= reps;
  CHECK(mean_abs_shift > 1e-4);
}

TEST_CASE("sample_graph draws exactly the requested sizes") {
  GeneratorConfig cfg;
  cfg.model = GeneratorConfig::Model::ChungLu;
  auto p = build_pstar(cfg, 100, 1);
  auto g = sample_graph(p, {60, 500, 9});
  CHECK(g.node_count() == 60);
  CHECK(g.total_weight() == 500.0);
  // sampled nodes are a subset of the latent node set
  for (NodeId n : g.nodes()) CHECK(n < 100);
}

TEST_CASE("sample_graph with one message puts it on a support pair") {
  ProbMatrix p({0, 1, 2}, {{{0, 1}, 0.5}, {{1, 2}, 0.5}}, ProbKind::LatentFull);
  auto g = sample_graph(p, {3, 1, 4});
  CHECK(g.total_weight() == 1.0);
  CHECK(g.support_size() == 1);
  CHECK_THROWS_AS(sample_graph(p, {3, 0, 4}), std::invalid_argument);
  CHECK_THROWS_AS(sample_graph(p, {4, 1, 4}), std::invalid_argument);
}

TEST_CASE("sample_graph is deterministic in the seed") {
  GeneratorConfig cfg;
  cfg.model = GeneratorConfig::Model::ChungLu;
  auto p = build_pstar(cfg, 50, 1);
  auto g1 = sample_graph(p, {30, 400, 21});
  auto g2 = sample_graph(p, {30, 400, 21});
  auto g3 = sample_graph(p, {30, 400, 22});
  CHECK(g1.nodes() == g2.nodes());
  CHECK(g1.edges() == g2.edges());
  CHECK(g1.edges() != g3.edges());
}

TEST_CASE("sampled cell weights match the restricted matrix in expectation") {
  ProbMatrix p({0, 1, 2, 3},
               {{{0, 1}, 0.5}, {{1, 2}, 0.3}, {{2, 3}, 0.2}},
               ProbKind::LatentFull);
  const std::uint64_t w = 2000;
  const int reps = 200;
  double mean01 = 0.0;
  for (int r = 0; r < reps; ++r)
    mean01 += sample_graph(p, {4, w, static_cast<std::uint64_t>(r)}).weight(0, 1);
  mean01 /= reps;
  double se = std::sqrt(w * 0.5 * 0.5 / reps);
  CHECK(std::abs(mean01 - 0.5 * w) < 4.0 * se);
}

TEST_CASE("multinomial counts have the right first two moments") {
  std::vector<double> probs{0.6, 0.3, 0.1};
  Rng rng(123);
  const int reps = 2000;
  const std::uint64_t n = 100;
  double mean0 = 0.0, var0 = 0.0;
  std::vector<double> draws;
  for (int r = 0; r < reps; ++r) {
    auto c = multinomial(n, probs, rng);
    REQUIRE(c[0] + c[1] + c[2] == n);
    draws.push_back(static_cast<double>(c[0]));
  }
  for (double d : draws) mean0 += d;
  mean0 /= reps;
  for (double d : draws) var0 += (d - mean0) * (d - mean0);
  var0 /= reps;
  CHECK(mean0 == Catch::Approx(60.0).margin(1.0));        // se ~ 0.11
  CHECK(var0 == Catch::Approx(100 * 0.6 * 0.4).epsilon(0.15));
}

TEST_CASE("rewire permutation with f=0 is the identity") {
  Rng rng(50);
  auto g = testutil::random_graph(rng, 10, 0.5);
  PermutationMode mode;
  mode.kind = PermutationMode::Kind::Rewire;
  mode.f = 0.0;
  auto out = permute_for_semisynthetic(g, mode, 1);
  CHECK(out.nodes() == g.nodes());
  CHECK(out.edges() == g.edges());
}

TEST_CASE("rewire permutation conserves message units") {
  Rng rng(51);
  for (int c = 0; c < 20; ++c) {
    auto g = testutil::random_graph(rng, 12, 0.5);
    if (g.total_weight() <= 0) continue;
    PermutationMode mode;
    mode.kind = PermutationMode::Kind::Rewire;
    mode.f = 1.0;
    auto out = permute_for_semisynthetic(g, mode, c);
    CHECK(out.total_weight() == Catch::Approx(g.total_weight()));
    CHECK(out.node_count() == g.node_count());
  }
}

TEST_CASE("degree flattening only moves mass touching high-degree nodes") {
  // hub node 0 carries all weight; node 3-4 edge is low-degree on both ends
  auto g = testutil::make_graph(
      {0, 1, 2, 3, 4},
      {{0, 1, 10.0}, {0, 2, 10.0}, {3, 4, 5.0}});
  PermutationMode mode;
  mode.kind = PermutationMode::Kind::DegreeFlatten;
  mode.f = 1.0;
  mode.top_frac = 0.2;  // ceil(0.2*5)=1 node: the hub
  auto out = permute_for_semisynthetic(g, mode, 7);
  CHECK(out.total_weight() == Catch::Approx(25.0));
  // the low-degree edge keeps its own mass (arrivals may add to it)
  CHECK(out.weight(3, 4) >= 5.0);
  // all 20 hub units moved; what remains on the hub edges is only
  // randomly redistributed mass, far below the original load
  CHECK(out.weight(0, 1) + out.weight(0, 2) < 15.0);
}

TEST_CASE("closing triangles adds the requested number of messages") {
  auto g = testutil::make_graph({0, 1, 2, 3},
                                {{0, 1, 5.0}, {1, 2, 5.0}, {2, 3, 5.0}});
  PermutationMode mode;
  mode.kind = PermutationMode::Kind::CloseTriangles;
  mode.n_closures = 10;
  auto out = permute_for_semisynthetic(g, mode, 3);
  CHECK(out.total_weight() == Catch::Approx(25.0));
}

TEST_CASE("closing triangles raises the empirical triangle probability") {
  GeneratorConfig cfg;
  cfg.model = GeneratorConfig::Model::ChungLu;
  auto p = build_pstar(cfg, 60, 2);
  PermutationMode mode;
  mode.kind = PermutationMode::Kind::CloseTriangles;
  mode.n_closures = 400;
  double tp_before = 0.0, tp_after = 0.0;
  const int reps = 10;
  for (int r = 0; r < reps; ++r) {
    auto g = sample_graph(p, {60, 2000, static_cast<std::uint64_t>(r)});
    tp_before += triangle_prob(g, false).value;
    tp_after += triangle_prob(permute_for_semisynthetic(g, mode, r), false).value;
  }
  CHECK(tp_after > tp_before);
}

TEST_CASE("aggregate_real_source pools snapshots into a latent matrix") {
  auto g1 = testutil::make_graph({0, 1}, {{0, 1, 3.0}});
  auto g2 = testutil::make_graph({1, 2}, {{1, 2, 1.0}});
  auto p = aggregate_real_source({g1, g2});
  CHECK(p.kind() == ProbKind::LatentFull);
  CHECK(p.nodes() == std::vector<NodeId>{0, 1, 2});
  CHECK(p.prob(0, 1) == Catch::Approx(0.75));
  CHECK(p.prob(1, 2) == Catch::Approx(0.25));

  auto same = aggregate_real_source({g1});
  CHECK(same.prob(0, 1) == Catch::Approx(1.0));

  CHECK_THROWS_AS(aggregate_real_source({}), std::invalid_argument);
  auto empty = testutil::make_graph({0, 1}, {});
  CHECK_THROWS_AS(aggregate_real_source({empty}), std::invalid_argument);
}

TEST_CASE("generator config validation catches bad parameters") {
  GeneratorConfig cl;
  cl.model = GeneratorConfig::Model::ChungLu;
  cl.exponent = 1.0;
  CHECK_THROWS_AS(cl.validate(), std::invalid_argument);
  GeneratorConfig er;
  er.model = GeneratorConfig::Model::ErdosRenyi;
  er.edge_prob = 0.0;
  CHECK_THROWS_AS(er.validate(), std::invalid_argument);
  GeneratorConfig mix;
  mix.model = GeneratorConfig::Model::Mixture;
  CHECK_THROWS_AS(mix.validate(), std::invalid_argument);
  GeneratorConfig rw;
  rw.model = GeneratorConfig::Model::TriangleRewire;
  rw.base = std::make_shared<GeneratorConfig>();
  rw.rho = 1.5;
  CHECK_THROWS_AS(rw.validate(), std::invalid_argument);
}
