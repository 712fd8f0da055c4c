#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "consistat/graph.hpp"
#include "consistat/rng.hpp"

namespace consistat {

struct ParseResult {
  std::vector<MessageRecord> messages;
  std::uint64_t malformed_lines = 0;
};

// Reads the tab-delimited message format: `src<TAB>dst<TAB>timestamp`,
// `#`-prefixed comment lines and blank lines ignored.  Malformed lines are
// counted, not fatal; callers enforce their own threshold.
inline ParseResult parse_messages(std::istream& in, SymbolTable& symbols) {
  ParseResult out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto tab1 = line.find('\t');
    auto tab2 = tab1 == std::string::npos ? std::string::npos
                                          : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) {
      ++out.malformed_lines;
      continue;
    }
    std::string src = line.substr(0, tab1);
    std::string dst = line.substr(tab1 + 1, tab2 - tab1 - 1);
    std::string ts = line.substr(tab2 + 1);
    if (src.empty() || dst.empty()) {
      ++out.malformed_lines;
      continue;
    }
    double t;
    try {
      std::size_t used = 0;
      t = std::stod(ts, &used);
      if (used != ts.size()) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      ++out.malformed_lines;
      continue;
    }
    out.messages.push_back({symbols.intern(src), symbols.intern(dst), t});
  }
  return out;
}

inline ParseResult parse_messages_file(const std::string& path,
                                       SymbolTable& symbols) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open message file: " + path);
  return parse_messages(in, symbols);
}

// ---------------------------------------------------------------------------
// Snapshot archive: JSON-lines, one header object followed by one object
// per snapshot.  Human-inspectable, round-trips exactly.
// ---------------------------------------------------------------------------

struct SnapshotArchive {
  SymbolTable symbols;
  std::vector<GraphSnapshot> snapshots;
  double delta = 0.0;
  double overlap_step = 0.0;
};

inline void write_archive(std::ostream& out, const SnapshotArchive& archive) {
  nlohmann::json header;
  header["type"] = "consistat-snapshot-archive";
  header["version"] = 1;
  header["labels"] = archive.symbols.labels();
  header["delta"] = archive.delta;
  header["overlap_step"] = archive.overlap_step;
  out << header.dump() << "\n";
  for (const auto& g : archive.snapshots) {
    nlohmann::json j;
    j["t_start"] = g.t_start();
    j["t_end"] = g.t_end();
    j["nodes"] = g.nodes();
    auto edges = nlohmann::json::array();
    for (const auto& [k, w] : g.edges())
      edges.push_back({k.first, k.second, w});
    j["edges"] = std::move(edges);
    out << j.dump() << "\n";
  }
}

inline void write_archive_file(const std::string& path,
                               const SnapshotArchive& archive) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write archive: " + path);
  write_archive(out, archive);
}

inline SnapshotArchive read_archive(std::istream& in) {
  SnapshotArchive archive;
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("archive is empty (missing header)");
  nlohmann::json header = nlohmann::json::parse(line);
  if (header.value("type", "") != "consistat-snapshot-archive")
    throw std::runtime_error("not a snapshot archive");
  for (const auto& label : header.at("labels"))
    archive.symbols.intern(label.get<std::string>());
  archive.delta = header.value("delta", 0.0);
  archive.overlap_step = header.value("overlap_step", 0.0);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    GraphSnapshot g(j.at("t_start").get<double>(), j.at("t_end").get<double>());
    for (const auto& n : j.at("nodes")) g.add_node(n.get<NodeId>());
    for (const auto& e : j.at("edges"))
      g.add_weight(e.at(0).get<NodeId>(), e.at(1).get<NodeId>(),
                   e.at(2).get<double>());
    archive.snapshots.push_back(std::move(g));
  }
  return archive;
}

inline SnapshotArchive read_archive_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open archive: " + path);
  return read_archive(in);
}

// ---------------------------------------------------------------------------
// Run provenance
// ---------------------------------------------------------------------------

inline constexpr const char* kLibraryVersion = "0.1.0";

inline std::uint64_t digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot digest missing file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return fnv1a64(buf.str());
}

struct RunManifest {
  std::string command_line;
  std::uint64_t seed = 0;
  std::uint64_t config_digest = 0;
  std::vector<std::pair<std::string, std::uint64_t>> input_digests;
  std::string version = kLibraryVersion;
  std::string wall_clock;
};

inline std::string current_wall_clock() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::ostringstream out;
  out << std::put_time(std::gmtime(&t), "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

inline void write_manifest(const std::string& path, const RunManifest& m) {
  nlohmann::json j;
  j["command_line"] = m.command_line;
  j["seed"] = m.seed;
  j["config_digest"] = m.config_digest;
  auto inputs = nlohmann::json::array();
  for (const auto& [name, digest] : m.input_digests)
    inputs.push_back({{"path", name}, {"fnv1a64", digest}});
  j["inputs"] = std::move(inputs);
  j["version"] = m.version;
  j["wall_clock"] = m.wall_clock;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace consistat
