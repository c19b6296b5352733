// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/cli/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <optional>

#include "flatlift/bench/bench.hpp"
#include "flatlift/core/error.hpp"
#include "flatlift/core/png.hpp"
#include "flatlift/mesh/geometry.hpp"
#include "flatlift/mesh/mesh_io.hpp"
#include "flatlift/service/service.hpp"

namespace flatlift::cli {

namespace fs = std::filesystem;
using pipeline::PipelineConfig;
using pipeline::RunManifest;

namespace {

// Problems with what the user asked for, as opposed to failures while doing it.
bool is_input_error(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::InvalidArgument:
    case ErrorKind::ManifestInvalid:
    case ErrorKind::MalformedImage:
    case ErrorKind::UnsupportedFormat:
    case ErrorKind::MalformedMesh:
      return true;
    default:
      return false;
  }
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct ConfigFlags {
  std::string config_file;
  std::optional<int> n_canny;
  std::optional<int> n_depth;
  std::optional<std::uint64_t> seed;
  bool single_condition = false;

  void add_to(CLI::App& cmd, bool generation) {
    cmd.add_option("--config", config_file, "TOML or JSON pipeline config")->check(CLI::ExistingFile);
    if (!generation) return;
    cmd.add_option("--n-canny", n_canny, "canny-conditioned candidates");
    cmd.add_option("--n-depth", n_depth, "depth-conditioned candidates");
    cmd.add_option("--seed", seed, "base generation seed");
    cmd.add_flag("--single-condition", single_condition, "one canny condition, no depth");
  }

  // Defaults, then the config file, then flags, then the environment.
  PipelineConfig resolve() const {
    PipelineConfig cfg = config_file.empty() ? PipelineConfig{} : pipeline::load_config_file(config_file);
    if (n_canny) cfg.n_canny = *n_canny;
    if (n_depth) cfg.n_depth = *n_depth;
    if (seed) cfg.seed = *seed;
    if (single_condition) cfg.single_condition_mode = true;
    pipeline::apply_env_overrides(cfg);
    return cfg;
  }
};

void print_summary(const RunManifest& m, const fs::path& dir, std::ostream& out) {
  out << "run_id " << m.run_id.hex() << "\n";
  out << "run_dir " << dir.string() << "\n";
  out << "status " << pipeline::to_string(m.status) << " (" << m.stages.size() << "/"
      << pipeline::kStageNames.size() << " stages)\n";
  if (const auto f = m.flatness()) {
    out << "flatness " << (f->is_flat ? "flat" : "shaded") << " colors=" << f->distinct_color_count
        << " flat_fraction=" << fixed(f->flat_pixel_fraction) << "\n";
  }
  if (const auto s = m.selection()) {
    out << "selected " << s->chosen_index << " of " << s->candidate_count << " (" << to_string(s->method) << ")\n";
  }
  if (const auto b = m.baseline_thinness()) {
    out << "baseline thinness_ratio " << fixed(b->thinness_ratio) << (b->flagged_thin ? " THIN" : "") << "\n";
  }
  if (const auto f = m.final_thinness()) {
    out << "final thinness_ratio " << fixed(f->thinness_ratio) << (f->flagged_thin ? " THIN" : "") << "\n";
  }
  for (const auto& w : m.warnings()) out << "warning: " << w << "\n";
  if (m.status == pipeline::RunStatus::Complete) out << "mesh " << (dir / "final.ply").string() << "\n";
}

fs::path default_run_dir(const std::vector<std::uint8_t>& input, const PipelineConfig& cfg) {
  return fs::path("runs") / pipeline::compute_run_id(input, cfg).hex().substr(0, 12);
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, Streams io, const pipeline::RunOptions& base_options) {
  CLI::App app{"Lift flat-colored 2D images to textured 3D meshes.", args.empty() ? "flatlift" : args[0]};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  // run
  auto* run = app.add_subcommand("run", "run the full pipeline on one image");
  std::string run_input, run_out;
  std::optional<int> run_override;
  ConfigFlags run_flags;
  run->add_option("input", run_input, "input PNG")->required()->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "run directory (default runs/<run id prefix>)");
  run->add_option("--override-index", run_override, "use this 1-based candidate instead of asking the VQA model");
  run_flags.add_to(*run, true);

  // conditions
  auto* cond = app.add_subcommand("conditions", "extract mask, flatness and condition maps, then pause");
  std::string cond_input, cond_out;
  ConfigFlags cond_flags;
  cond->add_option("input", cond_input, "input PNG")->required()->check(CLI::ExistingFile);
  cond->add_option("--out", cond_out, "run directory (default <input stem>-conditions)");
  cond_flags.add_to(*cond, true);

  // select
  auto* sel = app.add_subcommand("select", "finish a paused run, or redo its selection with --override-index");
  std::string sel_dir;
  std::optional<int> sel_override;
  std::string sel_config;
  sel->add_option("dir", sel_dir, "run directory")->required()->check(CLI::ExistingDirectory);
  sel->add_option("--override-index", sel_override, "1-based candidate to use as the proxy");
  sel->add_option("--config", sel_config, "config supplying endpoint tokens")->check(CLI::ExistingFile);

  // diagnose
  auto* diag = app.add_subcommand("diagnose", "report the principal extents and thinness of a mesh");
  std::string diag_mesh;
  double diag_threshold = mesh::kDefaultThinThreshold;
  diag->add_option("mesh", diag_mesh, "PLY or OBJ file")->required()->check(CLI::ExistingFile);
  diag->add_option("--threshold", diag_threshold, "thinness ratio below which the mesh is flagged")
      ->check(CLI::Range(0.0, 1.0));

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "run the pipeline over a dataset manifest");
  std::string bench_manifest, bench_format = "json", bench_out, bench_work;
  std::optional<std::size_t> bench_limit;
  int bench_jobs = 1;
  ConfigFlags bench_flags;
  bench_cmd->add_option("manifest", bench_manifest, "dataset manifest.json")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--limit", bench_limit, "first N entries only");
  bench_cmd->add_option("--format", bench_format, "report format")->check(CLI::IsMember({"json", "csv"}));
  bench_cmd->add_option("--out", bench_out, "write the report here instead of stdout");
  bench_cmd->add_option("--jobs", bench_jobs, "entries processed concurrently")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--work-dir", bench_work, "keep run directories here");
  bench_flags.add_to(*bench_cmd, true);

  // make-dataset
  auto* make = app.add_subcommand("make-dataset", "write the procedural flat-sprite dataset");
  std::string make_dir;
  int make_count = 100, make_size = 256;
  std::uint64_t make_seed = 2026;
  make->add_option("dir", make_dir, "output directory")->required();
  make->add_option("--count", make_count, "number of sprites")->check(CLI::PositiveNumber);
  make->add_option("--seed", make_seed, "generator seed");
  make->add_option("--size", make_size, "sprite side in pixels")->check(CLI::Range(16, 4096));

  // serve
  auto* srv = app.add_subcommand("serve", "serve the job API over HTTP");
  int srv_port = 8080;
  std::string srv_host = "127.0.0.1", srv_runs = "flatlift-runs";
  ConfigFlags srv_flags;
  srv->add_option("--port", srv_port, "TCP port")->check(CLI::Range(1, 65535));
  srv->add_option("--host", srv_host, "bind address");
  srv->add_option("--runs", srv_runs, "directory holding one run directory per job");
  srv_flags.add_to(*srv, false);

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("flatlift");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    app.exit(e, io.out, io.err);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    pipeline::RunOptions opts = base_options;
    if (*run) {
      const PipelineConfig cfg = run_flags.resolve();
      cfg.validate();
      opts.override_index = run_override;
      const auto input = read_file(run_input);
      const fs::path dir = run_out.empty() ? default_run_dir(input, cfg) : fs::path(run_out);
      print_summary(pipeline::run_pipeline(input, cfg, dir, opts), dir, io.out);
    } else if (*cond) {
      const PipelineConfig cfg = cond_flags.resolve();
      cfg.validate();
      opts.stop_before = "caption";
      const fs::path dir =
          cond_out.empty() ? fs::path(fs::path(cond_input).stem().string() + "-conditions") : fs::path(cond_out);
      const RunManifest m = pipeline::run_pipeline(read_file(cond_input), cfg, dir, opts);
      print_summary(m, dir, io.out);
      if (const auto* s = m.stage("conditions")) {
        for (const auto& [path, hash] : s->output_hashes) io.out << "condition " << (dir / path).string() << "\n";
      }
    } else if (*sel) {
      const RunManifest prior = pipeline::read_manifest(sel_dir);
      PipelineConfig secrets = sel_config.empty() ? PipelineConfig{} : pipeline::load_config_file(sel_config);
      pipeline::apply_env_overrides(secrets);
      const PipelineConfig cfg = pipeline::config_from_manifest(prior, secrets);
      if (sel_override) opts.override_index = sel_override;
      const bool nothing_to_do = prior.status == pipeline::RunStatus::Complete && !sel_override;
      print_summary(nothing_to_do ? prior : pipeline::resume(sel_dir, cfg, opts), sel_dir, io.out);
    } else if (*diag) {
      const auto m = mesh::load_mesh(read_file(diag_mesh));
      const auto r = mesh::thinness_report(m, diag_threshold);
      io.out << "vertices " << m.vertices.size() << "\n";
      io.out << "triangles " << m.triangles.size() << "\n";
      io.out << "principal_extents " << fixed(r.principal_extents[0], 6) << " " << fixed(r.principal_extents[1], 6)
             << " " << fixed(r.principal_extents[2], 6) << "\n";
      io.out << "thinness_ratio " << fixed(r.thinness_ratio) << "\n";
      io.out << (r.flagged_thin ? "THIN" : "OK") << "\n";
    } else if (*bench_cmd) {
      const PipelineConfig cfg = bench_flags.resolve();
      cfg.validate();
      const auto manifest = bench::load_manifest(bench_manifest);
      bench::BenchOptions bo;
      bo.limit = bench_limit;
      bo.parallelism = bench_jobs;
      bo.work_dir = bench_work;
      bo.run_options = opts;
      const auto report = bench::run_benchmark(manifest, cfg, bo);
      const std::string text =
          bench::write_report(report, bench_format == "csv" ? bench::ReportFormat::Csv : bench::ReportFormat::Json);
      if (bench_out.empty()) {
        io.out << text;
      } else {
        write_file_atomic(bench_out, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
      }
      for (const auto& e : report.errors) {
        io.err << "entry " << e.id << " failed" << (e.stage.empty() ? "" : " in " + e.stage) << ": " << e.message
               << "\n";
      }
    } else if (*make) {
      io.out << bench::write_procedural_dataset(make_dir, make_count, make_seed, make_size).string() << "\n";
    } else if (*srv) {
      service::ServiceOptions so;
      so.base = srv_flags.resolve();
      so.base.validate();
      so.runs_dir = srv_runs;
      so.run_options = opts;
      service::serve(so, srv_host, srv_port, io.err);
    }
  } catch (const StageError& e) {
    io.err << "error: stage " << e.stage() << " failed: " << e.what() << "\n";
    return kExitStageFailure;
  } catch (const Error& e) {
    io.err << "error: " << e.what() << "\n";
    return is_input_error(e.kind()) ? kExitUsage : kExitStageFailure;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitStageFailure;
  }
  return kExitOk;
}

}  // namespace flatlift::cli
