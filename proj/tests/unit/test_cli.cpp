// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "doctest.h"
#include "flatlift/bench/bench.hpp"
#include "flatlift/cli/cli.hpp"
#include "flatlift/core/png.hpp"
#include "flatlift/mesh/mesh_io.hpp"
#include "support/synth.hpp"

using namespace flatlift;
using namespace flatlift::testing;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "flatlift");
  std::ostringstream out, err;
  const int code = cli::cli_dispatch(args, {out, err});
  return {code, out.str(), err.str()};
}

fs::path write_png(const fs::path& dir, const std::string& name, const RasterImage& img) {
  const auto p = dir / name;
  write_file_atomic(p, encode_image(img));
  return p;
}

std::string file_hash(const fs::path& p) { return content_hash(read_file(p)).hex(); }

}  // namespace

TEST_CASE("run twice with the same seed writes identical meshes") {
  const auto dir = temp_dir("cli_run");
  const auto input = write_png(dir, "sprite.png", disk_image(96, 30, {220, 40, 40}, {255, 255, 255}));
  const auto a = run_cli({"run", input.string(), "--out", (dir / "a").string(), "--seed", "7"});
  const auto b = run_cli({"run", input.string(), "--out", (dir / "b").string(), "--seed", "7"});
  REQUIRE_MESSAGE(a.code == 0, a.err);
  REQUIRE(b.code == 0);
  CHECK(file_hash(dir / "a/final.ply") == file_hash(dir / "b/final.ply"));
  CHECK(a.out.find("status complete (8/8 stages)") != std::string::npos);
  CHECK(mesh::load_mesh(read_file(dir / "a/final.ply")).vertex_colors.has_value());
}

TEST_CASE("zero conditions is a usage error") {
  const auto dir = temp_dir("cli_zero");
  const auto input = write_png(dir, "x.png", disk_image(64, 20, {40, 120, 220}, {255, 255, 255}));
  const auto r = run_cli({"run", input.string(), "--n-canny", "0", "--n-depth", "0", "--out", (dir / "r").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("at least one condition required") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "r"));
}

TEST_CASE("usage errors name the offending flag") {
  const auto dir = temp_dir("cli_usage");
  const auto input = write_png(dir, "x.png", disk_image(64, 20, {40, 120, 220}, {255, 255, 255}));
  auto r = run_cli({"run", input.string(), "--bogus"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--bogus") != std::string::npos);

  r = run_cli({"run", input.string(), "--n-canny", "two"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--n-canny") != std::string::npos);

  r = run_cli({"bench", input.string(), "--format", "xml"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--format") != std::string::npos);

  r = run_cli({"run", (dir / "missing.png").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("missing.png") != std::string::npos);

  CHECK(run_cli({}).code == 1);
  CHECK(run_cli({"frobnicate"}).code == 1);
  r = run_cli({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("diagnose") != std::string::npos);
}

TEST_CASE("diagnose reports a 1 x 1 x 0.01 slab as thin") {
  // The corners of a box have population variance side^2 / 4 along each
  // axis, so the extent ratio is sqrt(var_z / var_y).
  const double var_small = 0.01 * 0.01 / 4, var_mid = 1.0 / 4;
  const double expected = std::sqrt(var_small / var_mid);
  CHECK(expected == doctest::Approx(0.01));

  const auto r = run_cli({"diagnose", (fixture_dir() / "mesh/slab.ply").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("thinness_ratio 0.0100\n") != std::string::npos);
  CHECK(r.out.find("THIN\n") != std::string::npos);
  CHECK(r.out.find("vertices 8\n") != std::string::npos);

  const auto loose = run_cli({"diagnose", (fixture_dir() / "mesh/slab.ply").string(), "--threshold", "0.005"});
  CHECK(loose.out.find("OK\n") != std::string::npos);

  const auto dir = temp_dir("cli_diag");
  std::ofstream(dir / "bad.ply") << "ply\nformat ascii 1.0\nelement vertex 2\n";
  const auto bad = run_cli({"diagnose", (dir / "bad.ply").string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("MalformedMesh") != std::string::npos);
}

TEST_CASE("a failing stage exits 2 and names the stage") {
  const auto dir = temp_dir("cli_fail");
  const auto input = write_png(dir, "blank.png", constant_image(64, 64, {255, 255, 255}));
  const auto r = run_cli({"run", input.string(), "--out", (dir / "r").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("stage mask failed") != std::string::npos);
  CHECK(pipeline::read_manifest(dir / "r").status == pipeline::RunStatus::Failed);

  std::ofstream(dir / "junk.png") << "not a png";
  CHECK(run_cli({"run", (dir / "junk.png").string(), "--out", (dir / "j").string()}).code == 1);
}

TEST_CASE("conditions pauses and select finishes with an override") {
  const auto dir = temp_dir("cli_select");
  const auto input = write_png(dir, "sprite.png", disk_image(96, 30, {40, 170, 80}, {255, 255, 255}));
  const auto run = dir / "r";
  const auto c = run_cli({"conditions", input.string(), "--out", run.string()});
  REQUIRE_MESSAGE(c.code == 0, c.err);
  CHECK(c.out.find("status paused (3/8 stages)") != std::string::npos);
  for (const char* f : {"mask.png", "conditions/canny_0.png", "conditions/canny_1.png", "conditions/depth_0.png",
                        "conditions/depth_1.png"}) {
    CHECK_MESSAGE(fs::exists(run / f), f);
  }

  CHECK(run_cli({"select", run.string(), "--override-index", "9"}).code == 1);
  const auto s = run_cli({"select", run.string(), "--override-index", "2"});
  REQUIRE_MESSAGE(s.code == 0, s.err);
  CHECK(s.out.find("selected 2 of 4 (UserOverride)") != std::string::npos);
  const auto m = pipeline::read_manifest(run);
  CHECK(m.status == pipeline::RunStatus::Complete);
  CHECK(read_file(run / "proxy.png") == read_file(run / "candidates/cand_2.png"));

  const auto again = run_cli({"select", run.string()});
  CHECK(again.code == 0);
  CHECK(pipeline::stable_view(pipeline::read_manifest(run)) == pipeline::stable_view(m));
}

TEST_CASE("single-condition mode and config sources") {
  const auto dir = temp_dir("cli_cfg");
  const auto input = write_png(dir, "sprite.png", disk_image(80, 26, {240, 180, 30}, {255, 255, 255}));
  const auto one = run_cli({"run", input.string(), "--out", (dir / "one").string(), "--single-condition"});
  REQUIRE_MESSAGE(one.code == 0, one.err);
  CHECK(one.out.find("selected 1 of 1") != std::string::npos);

  std::ofstream(dir / "cfg.toml") << "seed = 7\nn_depth = 1\n";
  const auto from_file = run_cli({"run", input.string(), "--out", (dir / "f").string(), "--config",
                              (dir / "cfg.toml").string()});
  const auto from_flags =
      run_cli({"run", input.string(), "--out", (dir / "g").string(), "--seed", "7", "--n-depth", "1"});
  REQUIRE(from_file.code == 0);
  REQUIRE(from_flags.code == 0);
  CHECK(pipeline::read_manifest(dir / "f").run_id == pipeline::read_manifest(dir / "g").run_id);
  // Flags win over the file.
  const auto both = run_cli({"run", input.string(), "--out", (dir / "h").string(), "--config",
                         (dir / "cfg.toml").string(), "--n-depth", "2"});
  CHECK(both.out.find("of 4 (") != std::string::npos);

  std::ofstream(dir / "bad.toml") << "n_cany = 3\n";
  const auto bad = run_cli({"run", input.string(), "--config", (dir / "bad.toml").string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("n_cany") != std::string::npos);

  const auto cache = dir / "cache";
  ::setenv("FLATLIFT_CACHE_DIR", cache.c_str(), 1);
  const auto cached = run_cli({"run", input.string(), "--out", (dir / "c").string()});
  ::unsetenv("FLATLIFT_CACHE_DIR");
  REQUIRE(cached.code == 0);
  CHECK(fs::exists(cache));
  CHECK_FALSE(fs::is_empty(cache));
}

TEST_CASE("make-dataset and bench") {
  const auto dir = temp_dir("cli_bench");
  const auto made = run_cli({"make-dataset", (dir / "ds").string(), "--count", "4", "--size", "128"});
  REQUIRE_MESSAGE(made.code == 0, made.err);
  CHECK(bench::load_manifest(dir / "ds/manifest.json").entries.size() == 4);

  const auto csv = run_cli({"bench", (dir / "ds/manifest.json").string(), "--limit", "2", "--format", "csv"});
  REQUIRE_MESSAGE(csv.code == 0, csv.err);
  std::size_t lines = 0;
  for (std::size_t p = 0; (p = csv.out.find("\r\n", p)) != std::string::npos; p += 2) ++lines;
  CHECK(lines == 3);

  const auto js = run_cli({"bench", (dir / "ds/manifest.json").string(), "--limit", "2", "--out",
                       (dir / "report.json").string()});
  REQUIRE(js.code == 0);
  const auto bytes = read_file(dir / "report.json");
  const auto doc = nlohmann::json::parse(bytes.begin(), bytes.end());
  CHECK(doc["aggregates"]["n"] == 2);
  CHECK(doc["rows"][0]["id"] == "sprite-000");

  std::ofstream(dir / "broken.json") << R"({"schema": 1, "name": "x", "entries": [{"id": "a b", "path": "none.png"}]})";
  const auto broken = run_cli({"bench", (dir / "broken.json").string()});
  CHECK(broken.code == 1);
  CHECK(broken.err.find("ManifestInvalid") != std::string::npos);
}
