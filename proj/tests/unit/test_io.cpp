#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "helpers.hpp"

using namespace consistat;

TEST_CASE("parse_messages reads the tab-delimited format") {
  std::istringstream in(
      "# comment header\n"
      "alice\tbob\t0.5\n"
      "\n"
      "bob\tcarol\t1.25\n");
  SymbolTable symbols;
  auto result = parse_messages(in, symbols);
  CHECK(result.malformed_lines == 0);
  REQUIRE(result.messages.size() == 2);
  CHECK(symbols.label(result.messages[0].src) == "alice");
  CHECK(symbols.label(result.messages[0].dst) == "bob");
  CHECK(result.messages[0].timestamp == 0.5);
  CHECK(result.messages[1].timestamp == 1.25);
  CHECK(symbols.size() == 3);
}

TEST_CASE("parse_messages counts malformed lines without aborting") {
  std::istringstream in(
      "a\tb\t1.0\n"
      "only-one-field\n"
      "a\tb\n"               // missing timestamp
      "a\tb\tnot-a-number\n"
      "a\tb\t2.0trailing\n"  // trailing junk after the number
      "\tb\t3.0\n"           // empty source
      "c\td\t4.0\n");
  SymbolTable symbols;
  auto result = parse_messages(in, symbols);
  CHECK(result.messages.size() == 2);
  CHECK(result.malformed_lines == 5);
}

TEST_CASE("parse_messages strips CRLF line endings") {
  std::istringstream in("a\tb\t1.0\r\n# comment\r\nc\td\t2.0\r\n");
  SymbolTable symbols;
  auto result = parse_messages(in, symbols);
  CHECK(result.malformed_lines == 0);
  REQUIRE(result.messages.size() == 2);
  CHECK(symbols.label(result.messages[1].dst) == "d");
}

TEST_CASE("parse_messages_file reports missing files") {
  SymbolTable symbols;
  CHECK_THROWS_AS(parse_messages_file("/nonexistent/path.tsv", symbols),
                  std::runtime_error);
}

TEST_CASE("snapshot archives round-trip exactly") {
  SnapshotArchive archive;
  archive.symbols.intern("alice");
  archive.symbols.intern("bob");
  archive.symbols.intern("carol");
  archive.delta = 2.5;
  archive.overlap_step = 1.0;
  GraphSnapshot g1(0.0, 2.5);
  g1.add_node(0);
  g1.add_node(1);
  g1.add_node(2);
  g1.add_weight(0, 1, 3.0);
  g1.add_weight(1, 2, 0.125);
  GraphSnapshot g2(1.0, 3.5);  // an empty snapshot round-trips too
  archive.snapshots = {g1, g2};

  std::ostringstream out;
  write_archive(out, archive);
  std::istringstream in(out.str());
  auto back = read_archive(in);

  CHECK(back.delta == archive.delta);
  CHECK(back.overlap_step == archive.overlap_step);
  CHECK(back.symbols.labels() == archive.symbols.labels());
  REQUIRE(back.snapshots.size() == 2);
  CHECK(back.snapshots[0].t_start() == 0.0);
  CHECK(back.snapshots[0].t_end() == 2.5);
  CHECK(back.snapshots[0].nodes() == g1.nodes());
  CHECK(back.snapshots[0].edges() == g1.edges());
  CHECK(back.snapshots[1].node_count() == 0);

  // writing the reread archive reproduces the bytes
  std::ostringstream out2;
  write_archive(out2, back);
  CHECK(out2.str() == out.str());
}

TEST_CASE("read_archive rejects non-archive input") {
  std::istringstream empty("");
  CHECK_THROWS_AS(read_archive(empty), std::runtime_error);
  std::istringstream wrong("{\"type\":\"something-else\"}\n");
  CHECK_THROWS_AS(read_archive(wrong), std::runtime_error);
}

TEST_CASE("file digests are content addressed") {
  std::string p1 = "/tmp/consistat_digest_a.txt";
  std::string p2 = "/tmp/consistat_digest_b.txt";
  { std::ofstream(p1) << "hello\n"; }
  { std::ofstream(p2) << "hello\n"; }
  CHECK(digest_file(p1) == digest_file(p2));
  { std::ofstream(p2) << "world\n"; }
  CHECK(digest_file(p1) != digest_file(p2));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
  CHECK_THROWS_AS(digest_file("/nonexistent/file.bin"), std::runtime_error);
}

TEST_CASE("run manifests serialize their provenance fields") {
  RunManifest m;
  m.command_line = "consistat generate --seed 7";
  m.seed = 7;
  m.config_digest = 42;
  m.input_digests = {{"input.tsv", 99}};
  m.wall_clock = "2026-01-01T00:00:00Z";
  std::string path = "/tmp/consistat_manifest_test.json";
  write_manifest(path, m);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto j = nlohmann::json::parse(buf.str());
  CHECK(j.at("seed") == 7);
  CHECK(j.at("version") == std::string(kLibraryVersion));
  CHECK(j.at("inputs")[0].at("path") == "input.tsv");
  CHECK(j.at("inputs")[0].at("fnv1a64") == 99);
  CHECK(j.at("command_line") == m.command_line);
  std::remove(path.c_str());
}

TEST_CASE("wall clock stamps are ISO-8601 UTC shaped") {
  auto stamp = current_wall_clock();
  REQUIRE(stamp.size() == 20);
  CHECK(stamp[4] == '-');
  CHECK(stamp[10] == 'T');
  CHECK(stamp.back() == 'Z');
}
