// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <thread>

#include "flatlift/bench/bench.hpp"
#include "flatlift/core/error.hpp"
#include "flatlift/core/png.hpp"

namespace flatlift::bench {

namespace {

BenchRow row_from(const std::string& id, const pipeline::RunManifest& m) {
  const auto flat = m.flatness();
  const auto base = m.baseline_thinness();
  const auto fin = m.final_thinness();
  const auto sel = m.selection();
  if (!flat || !base || !fin || !sel) throw Error(ErrorKind::StageFailed, "run finished without diagnostics");
  BenchRow r;
  r.id = id;
  r.is_flat = flat->is_flat;
  r.baseline_thinness = base->thinness_ratio;
  r.pipeline_thinness = fin->thinness_ratio;
  r.baseline_flagged = base->flagged_thin;
  r.pipeline_flagged = fin->flagged_thin;
  r.chosen_index = sel->chosen_index;
  r.selection_method = std::string(to_string(sel->method));
  return r;
}

}  // namespace

BenchReport run_benchmark(const DatasetManifest& manifest, const pipeline::PipelineConfig& cfg,
                          const BenchOptions& options) {
  cfg.validate();
  const std::size_t n = std::min(options.limit.value_or(manifest.entries.size()), manifest.entries.size());
  const std::filesystem::path work =
      options.work_dir.empty()
          ? std::filesystem::temp_directory_path() / ("flatlift-bench-" + std::to_string(::getpid()))
          : options.work_dir;

  std::vector<std::optional<BenchRow>> rows(n);
  std::vector<std::optional<BenchFailure>> failures(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const DatasetEntry& e = manifest.entries[i];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const auto input = read_file(manifest.resolve(e));
        const auto m = pipeline::run_pipeline(input, cfg, work / e.id, options.run_options);
        BenchRow r = row_from(e.id, m);
        r.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        rows[i] = std::move(r);
      } catch (const StageError& err) {
        failures[i] = BenchFailure{e.id, err.stage(), err.what()};
      } catch (const std::exception& err) {
        failures[i] = BenchFailure{e.id, "", err.what()};
      }
    }
  };
  const int threads = std::clamp(options.parallelism, 1, static_cast<int>(std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  BenchReport report;
  report.dataset = manifest.name;
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i]) report.rows.push_back(std::move(*rows[i]));
    if (failures[i]) report.errors.push_back(std::move(*failures[i]));
  }
  report.aggregates = aggregate(report.rows);
  return report;
}

}  // namespace flatlift::bench
