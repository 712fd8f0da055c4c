// consistat: anomaly detection in dynamic networks with size-consistent
// graph statistics.  Subcommands: ingest, generate, detect, evaluate,
// decompose, stats.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "consistat/consistat.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace consistat;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  unsigned threads = 1;  // reserved; current pipelines are single-threaded
  std::string output_dir = ".";
  std::string command_line;
};

void ensure_output_dir(const GlobalOpts& g) {
  fs::create_directories(g.output_dir);
}

std::string out_path(const GlobalOpts& g, const std::string& name) {
  return (fs::path(g.output_dir) / name).string();
}

void emit_manifest(const GlobalOpts& g, const std::string& name,
                   const json& config,
                   const std::vector<std::string>& inputs) {
  RunManifest m;
  m.command_line = g.command_line;
  m.seed = g.seed;
  m.config_digest = fnv1a64(config.dump());
  for (const auto& p : inputs) m.input_digests.emplace_back(p, digest_file(p));
  m.wall_clock = current_wall_clock();
  write_manifest(out_path(g, name + "-manifest.json"), m);
}

// "aggregate:5" / "prior:0.1" / "none" style compound option values
std::pair<std::string, std::string> split_compound(const std::string& s) {
  auto pos = s.find(':');
  if (pos == std::string::npos) return {s, ""};
  return {s.substr(0, pos), s.substr(pos + 1)};
}

std::pair<std::uint64_t, std::uint64_t> parse_range(const std::string& s) {
  auto [lo, hi] = split_compound(s);
  if (hi.empty()) return {std::stoull(lo), std::stoull(lo)};
  return {std::stoull(lo), std::stoull(hi)};
}

// ---------------------------------------------------------------------------
// Generator configuration shared by `generate` and `evaluate`
// ---------------------------------------------------------------------------

struct ModelFlags {
  std::string model = "chung-lu";
  double exponent = 2.0;
  double edge_prob = 0.01;
  std::uint32_t kpgm_k = 8;
  std::vector<double> kpgm_seed = {0.4, 0.3, 0.3, 0.0};
  std::string base_model;  // nested models for mixture / triangle-rewire
  std::string alt_model;
  double alt_fraction = 0.05;
  double rho = 0.05;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--model", model,
                    "chung-lu|erdos-renyi|kpgm|mixture|triangle-rewire");
    cmd->add_option("--exponent", exponent, "chung-lu power-law exponent");
    cmd->add_option("--edge-prob", edge_prob, "erdos-renyi support probability");
    cmd->add_option("--kpgm-k", kpgm_k, "kpgm Kronecker power");
    cmd->add_option("--kpgm-seed", kpgm_seed,
                    "kpgm 2x2 seed, row-major (4 values)")
        ->expected(4);
    cmd->add_option("--base-model", base_model,
                    "nested base model for mixture/triangle-rewire");
    cmd->add_option("--alt-model", alt_model, "nested alt model for mixture");
    cmd->add_option("--alt-fraction", alt_fraction, "mixture mass from alt");
    cmd->add_option("--rho", rho, "triangle-rewire removal probability");
  }

  GeneratorConfig build(const std::string& which) const {
    GeneratorConfig c;
    if (which == "chung-lu") {
      c.model = GeneratorConfig::Model::ChungLu;
      c.exponent = exponent;
    } else if (which == "erdos-renyi") {
      c.model = GeneratorConfig::Model::ErdosRenyi;
      c.edge_prob = edge_prob;
    } else if (which == "kpgm") {
      c.model = GeneratorConfig::Model::Kpgm;
      c.kpgm_k = kpgm_k;
      c.kpgm_seed = {{{kpgm_seed[0], kpgm_seed[1]},
                      {kpgm_seed[2], kpgm_seed[3]}}};
    } else if (which == "mixture") {
      c.model = GeneratorConfig::Model::Mixture;
      c.alt_fraction = alt_fraction;
      c.base = std::make_shared<GeneratorConfig>(
          build(base_model.empty() ? "chung-lu" : base_model));
      c.alt = std::make_shared<GeneratorConfig>(
          build(alt_model.empty() ? "erdos-renyi" : alt_model));
    } else if (which == "triangle-rewire") {
      c.model = GeneratorConfig::Model::TriangleRewire;
      c.rho = rho;
      c.base = std::make_shared<GeneratorConfig>(
          build(base_model.empty() ? "kpgm" : base_model));
    } else {
      throw CLI::ValidationError("--model", "unknown model: " + which);
    }
    return c;
  }

  json to_json() const {
    return {{"model", model},         {"exponent", exponent},
            {"edge_prob", edge_prob}, {"kpgm_k", kpgm_k},
            {"kpgm_seed", kpgm_seed}, {"base_model", base_model},
            {"alt_model", alt_model}, {"alt_fraction", alt_fraction},
            {"rho", rho}};
  }
};

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

struct IngestOpts {
  std::string input;
  std::string out = "snapshots.jsonl";
  double delta = 0.0;
  double overlap = 0.0;
  std::uint64_t malformed_threshold = 100;
};

int run_ingest(const GlobalOpts& g, const IngestOpts& o) {
  SymbolTable symbols;
  ParseResult parsed = parse_messages_file(o.input, symbols);
  if (parsed.malformed_lines > o.malformed_threshold) {
    std::cerr << json{{"error", "malformed-line threshold exceeded"},
                      {"malformed", parsed.malformed_lines},
                      {"threshold", o.malformed_threshold}}
                     .dump()
              << "\n";
    return 1;
  }
  auto built = build_snapshots(parsed.messages, o.delta, o.overlap);
  SnapshotArchive archive;
  archive.symbols = symbols;
  archive.snapshots = built.snapshots;
  archive.delta = o.delta;
  archive.overlap_step = o.overlap;
  ensure_output_dir(g);
  write_archive_file(out_path(g, o.out), archive);
  if (built.snapshots.empty())
    std::cerr << "warning: no messages ingested; archive is empty\n";
  std::cout << "snapshots: " << built.snapshots.size()
            << "  malformed_lines: " << parsed.malformed_lines
            << "  self_loops_dropped: " << built.self_loops_dropped << "\n";
  for (std::size_t i = 0; i < built.snapshots.size(); ++i) {
    const auto& s = built.snapshots[i];
    std::cout << i << "\t[" << s.t_start() << "," << s.t_end() << ")\tnodes="
              << s.node_count() << "\tedges=" << s.support_size()
              << "\tweight=" << s.total_weight() << "\n";
  }
  emit_manifest(g, "ingest",
                json{{"delta", o.delta},
                     {"overlap", o.overlap},
                     {"threshold", o.malformed_threshold}},
                {o.input});
  return 0;
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

struct GenerateOpts {
  ModelFlags model;
  std::uint32_t nodes = 1000;         // latent node count
  std::uint32_t sample_nodes = 0;     // 0 = all latent nodes
  std::uint64_t messages = 30000;
  std::string out = "messages.tsv";
};

int run_generate(const GlobalOpts& g, const GenerateOpts& o) {
  GeneratorConfig config = o.model.build(o.model.model);
  ProbMatrix pstar = build_pstar(config, o.nodes, g.seed);
  SampleSpec spec{o.sample_nodes == 0 ? o.nodes : o.sample_nodes, o.messages,
                  g.seed};
  GraphSnapshot graph = sample_graph(pstar, spec);
  ensure_output_dir(g);
  std::string path = out_path(g, o.out);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write message file: " + path);
  out << "# src\tdst\ttimestamp\n";
  std::uint64_t index = 0;
  for (const auto& [k, w] : graph.edges()) {
    auto reps = static_cast<std::uint64_t>(w);
    for (std::uint64_t r = 0; r < reps; ++r)
      out << "n" << k.first << "\tn" << k.second << "\t"
          << static_cast<double>(index++) << "\n";
  }
  std::cout << "nodes: " << graph.node_count()
            << "  messages: " << static_cast<std::uint64_t>(graph.total_weight())
            << "  support: " << graph.support_size() << "\n";
  emit_manifest(g, "generate",
                json{{"model", o.model.to_json()},
                     {"nodes", o.nodes},
                     {"sample_nodes", o.sample_nodes},
                     {"messages", o.messages}},
                {});
  return 0;
}

// ---------------------------------------------------------------------------
// detect
// ---------------------------------------------------------------------------

struct DetectOpts {
  std::string input;
  std::string stat = "ms";
  double alpha = 0.05;
  std::uint32_t window = 50;
  std::string smoothing = "none";
  std::string baseline = "previous";
  bool uncorrected = false;
  std::size_t max_neighbors = 0;
  std::string out_prefix = "detect";
};

DetectorConfig detector_config(const DetectOpts& o, std::uint64_t seed) {
  DetectorConfig c;
  c.stat = stat_id_from_string(o.stat);
  c.alpha = o.alpha;
  c.window = o.window;
  c.corrected = !o.uncorrected;
  c.max_neighbors = o.max_neighbors;
  c.seed = seed;
  auto [skind, sarg] = split_compound(o.smoothing);
  if (skind == "none") {
    c.smoothing = Smoothing::None;
  } else if (skind == "aggregate") {
    c.smoothing = Smoothing::Aggregate;
    if (!sarg.empty()) c.smoothing_k = static_cast<std::uint32_t>(std::stoul(sarg));
  } else if (skind == "prior") {
    c.smoothing = Smoothing::Prior;
    if (!sarg.empty()) c.prior_c = std::stod(sarg);
  } else {
    throw CLI::ValidationError("--smoothing", "unknown smoothing: " + skind);
  }
  auto [bkind, barg] = split_compound(o.baseline);
  if (bkind == "previous") {
    c.baseline = DeltaBaseline::Previous;
  } else if (bkind == "aggregate") {
    c.baseline = DeltaBaseline::Aggregate;
    if (!barg.empty()) c.baseline_k = static_cast<std::uint32_t>(std::stoul(barg));
  } else {
    throw CLI::ValidationError("--baseline", "unknown baseline: " + bkind);
  }
  return c;
}

int run_detect(const GlobalOpts& g, const DetectOpts& o) {
  SnapshotArchive archive = read_archive_file(o.input);
  DetectorConfig config = detector_config(o, g.seed);
  StatisticSeries series = compute_series(archive.snapshots, config);
  auto results = detect_stream(series, config);
  ensure_output_dir(g);
  std::ofstream tsv(out_path(g, o.out_prefix + ".tsv"));
  std::ofstream jsonl(out_path(g, o.out_prefix + ".jsonl"));
  tsv << "# index\tvalue\tlower_cp\tupper_cp\tflagged\n";
  std::size_t flags = 0;
  for (const auto& r : results) {
    tsv << r.t << "\t";
    if (r.value) tsv << *r.value;
    else tsv << "NA";
    tsv << "\t" << r.lower_cp << "\t" << r.upper_cp << "\t"
        << (r.flagged ? 1 : 0) << "\n";
    json j{{"index", r.t},
           {"lower_cp", r.lower_cp},
           {"upper_cp", r.upper_cp},
           {"flagged", r.flagged},
           {"warmup", r.warmup},
           {"window_size_used", r.window_size_used}};
    if (r.value) j["value"] = *r.value;
    else j["value"] = nullptr;
    jsonl << j.dump() << "\n";
    if (r.flagged) ++flags;
  }
  std::cout << "steps: " << results.size() << "  flagged: " << flags << "\n";
  emit_manifest(g, o.out_prefix,
                json{{"stat", o.stat},
                     {"alpha", o.alpha},
                     {"window", o.window},
                     {"smoothing", o.smoothing},
                     {"baseline", o.baseline},
                     {"uncorrected", o.uncorrected}},
                {o.input});
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateOpts {
  ModelFlags model;
  std::string stat = "ms";
  std::string anomaly = "mixture";  // none|mixture|rewire
  std::uint32_t trials = 50;
  std::uint32_t n_total = 2500;
  std::uint32_t nodes = 1000;
  std::string normal_messages = "30000:40000";
  std::string fp_messages = "40000:50000";
  std::uint32_t fp_nodes = 0;  // 0 = same as --nodes
  std::vector<double> alphas;
  bool uncorrected = false;
  std::size_t max_neighbors = 0;
  bool dump_values = false;
  std::string source;           // semi-synthetic source archive
  std::string permute = "";     // rewire:f | degree-flatten:f:top | close-triangles:n
};

PermutationMode parse_permutation(const std::string& s) {
  auto [kind, rest] = split_compound(s);
  PermutationMode m;
  if (kind == "rewire") {
    m.kind = PermutationMode::Kind::Rewire;
    if (!rest.empty()) m.f = std::stod(rest);
  } else if (kind == "degree-flatten") {
    m.kind = PermutationMode::Kind::DegreeFlatten;
    auto [f, top] = split_compound(rest);
    if (!f.empty()) m.f = std::stod(f);
    if (!top.empty()) m.top_frac = std::stod(top);
  } else if (kind == "close-triangles") {
    m.kind = PermutationMode::Kind::CloseTriangles;
    if (!rest.empty()) m.n_closures = std::stoull(rest);
  } else {
    throw CLI::ValidationError("--permute", "unknown permutation: " + kind);
  }
  return m;
}

void write_roc_outputs(const GlobalOpts& g, const ExperimentResult& result,
                       bool dump_values) {
  ensure_output_dir(g);
  std::ofstream tsv(out_path(g, "roc.tsv"));
  tsv << "# alpha\tfpr\ttpr\n";
  for (const auto& p : result.roc.points)
    tsv << p.alpha << "\t" << p.fpr << "\t" << p.tpr << "\n";
  json summary{{"auc", result.roc.auc},
               {"operating_point",
                {{"alpha", result.roc.marked.alpha},
                 {"fpr", result.roc.marked.fpr},
                 {"tpr", result.roc.marked.tpr}}}};
  std::ofstream sj(out_path(g, "summary.json"));
  sj << summary.dump(2) << "\n";
  if (dump_values) {
    std::ofstream vs(out_path(g, "values.tsv"));
    vs << "# set\ttrial\tvalue\n";
    auto dump = [&](const char* name, const std::vector<double>& v) {
      for (std::size_t i = 0; i < v.size(); ++i)
        vs << name << "\t" << i << "\t" << v[i] << "\n";
    };
    dump("normal", result.values.normal);
    dump("fp", result.values.fp);
    dump("tp", result.values.tp);
  }
  std::cout << summary.dump() << "\n";
}

int run_evaluate(const GlobalOpts& g, const EvaluateOpts& o) {
  auto [nlo, nhi] = parse_range(o.normal_messages);
  auto [flo, fhi] = parse_range(o.fp_messages);
  std::vector<double> alphas = o.alphas.empty() ? default_alpha_grid() : o.alphas;
  ExperimentResult result;
  if (!o.source.empty()) {
    SnapshotArchive archive = read_archive_file(o.source);
    SemiSyntheticSpec spec;
    spec.mode = parse_permutation(o.permute.empty() ? "rewire:0.05" : o.permute);
    spec.n_trials = o.trials;
    spec.normal_sizes = {o.nodes, nlo, nhi};
    spec.fp_sizes = {o.fp_nodes == 0 ? o.nodes : o.fp_nodes, flo, fhi};
    spec.tp_sizes = {o.nodes, nlo, nhi};
    spec.stat = stat_id_from_string(o.stat);
    spec.corrected = !o.uncorrected;
    spec.alphas = alphas;
    spec.seed = g.seed;
    spec.max_neighbors = o.max_neighbors;
    result = run_semisynthetic(archive.snapshots, spec);
  } else {
    ExperimentSpec spec;
    spec.normal_config = o.model.build(o.model.model);
    if (o.anomaly == "none") {
      spec.anomalous_config = spec.normal_config;
    } else if (o.anomaly == "mixture") {
      GeneratorConfig mix;
      mix.model = GeneratorConfig::Model::Mixture;
      mix.alt_fraction = o.model.alt_fraction;
      mix.base = std::make_shared<GeneratorConfig>(spec.normal_config);
      GeneratorConfig alt;
      alt.model = GeneratorConfig::Model::ErdosRenyi;
      alt.edge_prob = o.model.edge_prob;
      mix.alt = std::make_shared<GeneratorConfig>(alt);
      spec.anomalous_config = mix;
    } else if (o.anomaly == "rewire") {
      GeneratorConfig rw;
      rw.model = GeneratorConfig::Model::TriangleRewire;
      rw.rho = o.model.rho;
      rw.base = std::make_shared<GeneratorConfig>(spec.normal_config);
      spec.anomalous_config = rw;
    } else {
      throw CLI::ValidationError("--anomaly", "unknown anomaly: " + o.anomaly);
    }
    spec.n_total = o.n_total;
    spec.n_trials = o.trials;
    spec.normal_sizes = {o.nodes, nlo, nhi};
    spec.fp_sizes = {o.fp_nodes == 0 ? o.nodes : o.fp_nodes, flo, fhi};
    spec.tp_sizes = {o.nodes, nlo, nhi};
    spec.stat = stat_id_from_string(o.stat);
    spec.corrected = !o.uncorrected;
    spec.alphas = alphas;
    spec.seed = g.seed;
    spec.max_neighbors = o.max_neighbors;
    result = run_synthetic(spec);
  }
  write_roc_outputs(g, result, o.dump_values);
  std::vector<std::string> inputs;
  if (!o.source.empty()) inputs.push_back(o.source);
  emit_manifest(g, "evaluate",
                json{{"stat", o.stat},
                     {"anomaly", o.anomaly},
                     {"trials", o.trials},
                     {"model", o.model.to_json()},
                     {"normal_messages", o.normal_messages},
                     {"fp_messages", o.fp_messages},
                     {"permute", o.permute}},
                inputs);
  return 0;
}

// ---------------------------------------------------------------------------
// decompose
// ---------------------------------------------------------------------------

struct DecomposeOpts {
  std::string before;  // archive with the baseline snapshot
  std::string during;  // archive with the flagged snapshot (optional)
  std::string stat = "ms";
  std::size_t index_before = 0;
  std::size_t index_during = 0;
  double target = 0.2;
  std::string scale = "linear";
  std::string out_prefix = "decompose";
};

json component_json(const Component& c, double score) {
  json ids = json::array();
  for (std::uint8_t i = 0; i < c.arity; ++i) ids.push_back(c.ids[i]);
  const char* kind = c.kind == ComponentKind::Edge
                         ? "edge"
                         : (c.kind == ComponentKind::Node ? "node" : "triplet");
  return {{"kind", kind}, {"ids", ids}, {"score", score}};
}

int run_decompose(const GlobalOpts& g, const DecomposeOpts& o) {
  StatId stat = stat_id_from_string(o.stat);
  SnapshotArchive before = read_archive_file(o.before);
  if (o.index_before >= before.snapshots.size())
    throw std::runtime_error("snapshot index out of range in before archive");
  const GraphSnapshot& g_before = before.snapshots[o.index_before];

  bool delta = stat == StatId::MS || stat == StatId::GED;
  SnapshotArchive during;
  const GraphSnapshot* g_during = &g_before;
  if (delta) {
    if (o.during.empty())
      throw std::runtime_error("delta statistic needs a during archive");
    during = read_archive_file(o.during);
    if (o.index_during >= during.snapshots.size())
      throw std::runtime_error("snapshot index out of range in during archive");
    g_during = &during.snapshots[o.index_during];
  }

  ContributionMap contrib = delta ? decompose(stat, g_before, *g_during)
                                  : decompose(stat, g_before);
  CoverageScale scale =
      o.scale == "log" ? CoverageScale::Log : CoverageScale::Linear;
  auto [sub_before, sub_during] =
      extract_subgraph(contrib, g_before, *g_during, o.target, scale);

  ensure_output_dir(g);
  json out{{"stat", o.stat},
           {"total", contrib.total},
           {"coverage", sub_before.coverage},
           {"selected", json::array()},
           {"context_edges_before", json::array()},
           {"context_edges_during", json::array()}};
  for (const auto& [c, score] : sub_before.selected)
    out["selected"].push_back(component_json(c, score));
  for (const auto& [k, w] : sub_before.context_edges)
    out["context_edges_before"].push_back({k.first, k.second, w});
  for (const auto& [k, w] : sub_during.context_edges)
    out["context_edges_during"].push_back({k.first, k.second, w});
  std::ofstream js(out_path(g, o.out_prefix + ".json"));
  js << out.dump(2) << "\n";
  std::ofstream edges(out_path(g, o.out_prefix + "-subgraph.tsv"));
  edges << "# src\tdst\tweight\tphase\n";
  for (const auto& [k, w] : sub_before.context_edges)
    edges << k.first << "\t" << k.second << "\t" << w << "\tbefore\n";
  for (const auto& [k, w] : sub_during.context_edges)
    edges << k.first << "\t" << k.second << "\t" << w << "\tduring\n";
  std::cout << "selected: " << sub_before.selected.size()
            << "  total: " << contrib.total << "\n";
  std::vector<std::string> inputs{o.before};
  if (!o.during.empty()) inputs.push_back(o.during);
  emit_manifest(g, o.out_prefix,
                json{{"stat", o.stat}, {"target", o.target}, {"scale", o.scale}},
                inputs);
  return 0;
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

struct StatsOpts {
  std::string first;
  std::string second;
  std::string stat = "ms";
  std::size_t index1 = 0;
  std::size_t index2 = 0;
  bool uncorrected = false;
  std::size_t max_neighbors = 0;
};

int run_stats(const GlobalOpts& g, const StatsOpts& o) {
  StatId stat = stat_id_from_string(o.stat);
  SnapshotArchive a1 = read_archive_file(o.first);
  if (o.index1 >= a1.snapshots.size())
    throw std::runtime_error("snapshot index out of range");
  const GraphSnapshot& g1 = a1.snapshots[o.index1];
  double value;
  bool corrected = !o.uncorrected;
  if (!is_delta_stat(stat)) {
    Rng rng = Rng::substream(g.seed, "stats-tp");
    value = stat == StatId::CB
                ? barrat_clustering(g1).value
                : triangle_prob(g1, corrected, o.max_neighbors, &rng).value;
  } else {
    if (o.second.empty())
      throw std::runtime_error("delta statistic needs two snapshot files");
    SnapshotArchive a2 = read_archive_file(o.second);
    if (o.index2 >= a2.snapshots.size())
      throw std::runtime_error("snapshot index out of range");
    const GraphSnapshot& g2 = a2.snapshots[o.index2];
    switch (stat) {
      case StatId::GED: value = ged(g1, g2).value; break;
      case StatId::DD:
        value = degree_dist_diff(g1, g2, default_dd_bins(g1, g2)).value;
        break;
      case StatId::DELTACON: value = deltacon_distance(g1, g2).value; break;
      case StatId::NETSIMILE: value = netsimile_distance(g1, g2).value; break;
      case StatId::MS: value = mass_shift(g1, g2, corrected).value; break;
      case StatId::PDD:
        value = pdd(g1, g2, default_pdd_bins(g1, g2), corrected).value;
        break;
      default: throw std::runtime_error("unhandled statistic");
    }
  }
  std::cout << json{{"stat", o.stat}, {"value", value}}.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"size-consistent network statistics for dynamic-graph anomaly "
               "detection"};
  app.require_subcommand(1);
  app.set_config("--config", "", "config file (flags override config values)");

  GlobalOpts g;
  app.add_option("--seed", g.seed, "root seed for all randomness");
  app.add_option("--threads", g.threads,
                 "worker threads (reserved; pipelines run single-threaded)");
  app.add_option("--output-dir", g.output_dir, "directory for output files");

  IngestOpts ingest;
  auto* cmd_ingest = app.add_subcommand("ingest", "messages -> snapshot archive");
  cmd_ingest->add_option("input", ingest.input, "message file")->required();
  cmd_ingest->add_option("--delta", ingest.delta, "window width")->required();
  cmd_ingest->add_option("--overlap", ingest.overlap, "overlap step (0 = none)");
  cmd_ingest->add_option("--malformed-threshold", ingest.malformed_threshold,
                         "max tolerated malformed lines");
  cmd_ingest->add_option("--out", ingest.out, "archive file name");

  GenerateOpts gen;
  auto* cmd_generate = app.add_subcommand("generate", "sample a synthetic graph");
  gen.model.add_to(cmd_generate);
  cmd_generate->add_option("--nodes", gen.nodes, "latent node count");
  cmd_generate->add_option("--sample-nodes", gen.sample_nodes,
                           "sampled node count (0 = all)");
  cmd_generate->add_option("--messages", gen.messages, "message count");
  cmd_generate->add_option("--out", gen.out, "message file name");

  DetectOpts det;
  auto* cmd_detect = app.add_subcommand("detect", "flag anomalous time steps");
  cmd_detect->add_option("input", det.input, "snapshot archive")->required();
  cmd_detect->add_option("--stat", det.stat, "statistic id");
  cmd_detect->add_option("--alpha", det.alpha, "two-tailed significance level");
  cmd_detect->add_option("--window", det.window, "null window size");
  cmd_detect->add_option("--smoothing", det.smoothing,
                         "none|aggregate:k|prior:c");
  cmd_detect->add_option("--baseline", det.baseline, "previous|aggregate:k");
  cmd_detect->add_flag("--uncorrected", det.uncorrected,
                       "disable bias correction for ms/pdd/tp");
  cmd_detect->add_option("--max-neighbors", det.max_neighbors,
                         "tp neighbor bound (0 = exhaustive)");
  cmd_detect->add_option("--out-prefix", det.out_prefix, "output name prefix");

  EvaluateOpts ev;
  auto* cmd_evaluate = app.add_subcommand("evaluate", "ROC experiments");
  ev.model.add_to(cmd_evaluate);
  cmd_evaluate->add_option("--stat", ev.stat, "statistic id");
  cmd_evaluate->add_option("--anomaly", ev.anomaly, "none|mixture|rewire");
  cmd_evaluate->add_option("--trials", ev.trials, "trials per graph set");
  cmd_evaluate->add_option("--n-total", ev.n_total, "latent node count");
  cmd_evaluate->add_option("--nodes", ev.nodes, "sampled node count");
  cmd_evaluate->add_option("--normal-messages", ev.normal_messages, "lo:hi");
  cmd_evaluate->add_option("--fp-messages", ev.fp_messages, "lo:hi");
  cmd_evaluate->add_option("--fp-nodes", ev.fp_nodes,
                           "fp sampled node count (0 = same as --nodes)");
  cmd_evaluate->add_option("--alphas", ev.alphas, "alpha grid");
  cmd_evaluate->add_flag("--uncorrected", ev.uncorrected,
                         "disable bias correction");
  cmd_evaluate->add_option("--max-neighbors", ev.max_neighbors,
                           "tp neighbor bound");
  cmd_evaluate->add_flag("--dump-values", ev.dump_values,
                         "write per-trial statistic values");
  cmd_evaluate->add_option("--source", ev.source,
                           "semi-synthetic source archive");
  cmd_evaluate->add_option("--permute", ev.permute,
                           "rewire:f|degree-flatten:f:top|close-triangles:n");

  DecomposeOpts dec;
  auto* cmd_decompose =
      app.add_subcommand("decompose", "explain a flagged step locally");
  cmd_decompose->add_option("before", dec.before, "baseline snapshot archive")
      ->required();
  cmd_decompose->add_option("during", dec.during, "flagged snapshot archive");
  cmd_decompose->add_option("--stat", dec.stat, "ms|tp|ged|barrat");
  cmd_decompose->add_option("--index", dec.index_before, "snapshot index");
  cmd_decompose->add_option("--index2", dec.index_during,
                            "snapshot index in during archive");
  cmd_decompose->add_option("--target", dec.target, "coverage fraction");
  cmd_decompose->add_option("--scale", dec.scale, "linear|log");
  cmd_decompose->add_option("--out-prefix", dec.out_prefix,
                            "output name prefix");

  StatsOpts st;
  auto* cmd_stats =
      app.add_subcommand("stats", "one-shot statistic on snapshot files");
  cmd_stats->add_option("first", st.first, "snapshot archive")->required();
  cmd_stats->add_option("second", st.second, "second archive (delta stats)");
  cmd_stats->add_option("--stat", st.stat, "statistic id");
  cmd_stats->add_option("--index", st.index1, "snapshot index");
  cmd_stats->add_option("--index2", st.index2, "second snapshot index");
  cmd_stats->add_flag("--uncorrected", st.uncorrected,
                      "disable bias correction");
  cmd_stats->add_option("--max-neighbors", st.max_neighbors,
                        "tp neighbor bound");

  std::ostringstream cmdline;
  for (int i = 0; i < argc; ++i) cmdline << (i ? " " : "") << argv[i];
  g.command_line = cmdline.str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_ingest->parsed()) return run_ingest(g, ingest);
    if (cmd_generate->parsed()) return run_generate(g, gen);
    if (cmd_detect->parsed()) return run_detect(g, det);
    if (cmd_evaluate->parsed()) return run_evaluate(g, ev);
    if (cmd_decompose->parsed()) return run_decompose(g, dec);
    if (cmd_stats->parsed()) return run_stats(g, st);
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
